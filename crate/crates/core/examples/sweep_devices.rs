//! Throughput and energy efficiency as the number of devices grows, for all
//! policies, with a shared seed across points.

use ris_ra::access::PolicyKind;
use ris_ra::config::ScenarioConfig;
use ris_ra::engine::{sweep, SweepAxis, SweepSpec};

fn main() -> ris_ra::Result<()> {
    let spec = SweepSpec {
        axis: SweepAxis::Devices,
        values: (2..=20).step_by(3).map(f64::from).collect(),
        base: ScenarioConfig {
            trials: 1_000,
            ..ScenarioConfig::default()
        },
        policies: vec![PolicyKind::Carp, PolicyKind::Crdsap, PolicyKind::Irsap],
    };
    println!("{:<7} {:>3} {:>9} {:>10}", "policy", "K", "G", "EE");
    for row in sweep(&spec)? {
        println!(
            "{:<7} {:>3} {:>9.4} {:>10.5}",
            row.policy.to_string(),
            row.config.devices,
            row.result.mean_throughput,
            row.result.ee_ratio_of_means
        );
    }
    Ok(())
}
