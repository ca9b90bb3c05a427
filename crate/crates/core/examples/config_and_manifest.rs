//! Settings from text with overrides, validation, and the manifest that
//! makes a run reproducible.

use std::path::Path;

use ris_ra::config::Settings;
use ris_ra::engine::run_monte_carlo;
use ris_ra::report::Manifest;

fn main() -> ris_ra::Result<()> {
    let mut settings = Settings::from_text("scenario.k = 16\nscenario.s = 24\nsim.trials = 300\n")?;
    settings.apply_override("policy.kind=irsap")?;
    let cfg = settings.scenario()?;
    let result = run_monte_carlo(&cfg)?;
    println!("irsap K=16 S=24: G = {:.4} +/- {:.4}", result.mean_throughput, result.ci95_throughput);

    let mut bad = settings.clone();
    bad.apply_override("policy.kind=sscp")?;
    bad.apply_override("policy.sscp_s=30")?;
    if let Err(e) = bad.scenario() {
        println!("rejected: {e}");
    }

    let manifest = Manifest {
        settings: &settings,
        command: "run",
        output: Path::new("irsap.csv"),
        effective_ratios: vec![(cfg.policy, cfg.effective_training_ratio())],
    };
    print!("{}", manifest.to_text());
    Ok(())
}
