//! Throughput and energy efficiency of every policy at the baseline
//! scenario, printed as CSV.

use ris_ra::access::PolicyKind;
use ris_ra::config::ScenarioConfig;
use ris_ra::engine::run_monte_carlo;
use ris_ra::report::{csv_row, CSV_HEADER};

fn main() -> ris_ra::Result<()> {
    let base = ScenarioConfig {
        trials: 2_000,
        ..ScenarioConfig::default()
    };
    println!("{CSV_HEADER}");
    for policy in [PolicyKind::Carp, PolicyKind::Sscp { s: 2 }, PolicyKind::Crdsap, PolicyKind::Irsap] {
        let cfg = ScenarioConfig { policy, ..base.clone() };
        let result = run_monte_carlo(&cfg)?;
        println!("{}", csv_row(&policy.to_string(), &cfg, &result));
    }
    Ok(())
}
