//! Number of access slots that maximises throughput and energy efficiency
//! for a fixed device population.

use ris_ra::access::PolicyKind;
use ris_ra::config::ScenarioConfig;
use ris_ra::engine::optimal_over_s;

fn main() -> ris_ra::Result<()> {
    for policy in [PolicyKind::Carp, PolicyKind::Crdsap, PolicyKind::Irsap] {
        let cfg = ScenarioConfig {
            policy,
            devices: 10,
            trials: 500,
            ..ScenarioConfig::default()
        };
        let s_values: Vec<usize> = (policy.min_slots()..=30).collect();
        let opt = optimal_over_s(&cfg, &s_values)?;
        let g = opt.at(opt.best_throughput).unwrap();
        let ee = opt.at(opt.best_energy_efficiency).unwrap();
        println!(
            "{policy}: best G {:.4} at S={}, best EE {:.5} at S={}",
            g.mean_throughput, opt.best_throughput, ee.ee_ratio_of_means, opt.best_energy_efficiency
        );
    }
    Ok(())
}
