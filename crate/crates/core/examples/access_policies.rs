//! How each access policy spreads one device's replicas over the slots,
//! given the same measured channel qualities.

use ris_ra::access::{decide_access, measure_quality, PolicyKind};
use ris_ra::channel::snr_matrix;
use ris_ra::config::ScenarioConfig;
use ris_ra::rng::seeded;

fn main() -> ris_ra::Result<()> {
    let cfg = ScenarioConfig {
        devices: 4,
        slots: 8,
        ..ScenarioConfig::default()
    };
    let mut rng = seeded(7);
    let placements = ris_ra::channel::sample_mtd_placements(&mut rng, cfg.devices, cfg.mtd_distance_m, cfg.mtd_angle_rad, cfg.mtd_gain)?;
    let snr = snr_matrix(&cfg.geometry()?, &cfg.ap()?, &placements, &cfg.phases()?, &cfg.radio()?);
    let quality = measure_quality(&snr, &[1.0; 4], &[0.0; 4], &mut rng)?;

    for policy in [PolicyKind::Carp, PolicyKind::Sscp { s: 3 }, PolicyKind::Crdsap, PolicyKind::Irsap] {
        let q = policy.requires_training().then_some(&quality);
        let decision = decide_access(policy, q, &mut rng, cfg.devices, cfg.slots)?;
        println!("{policy}:");
        for (k, slots) in decision.iter().enumerate() {
            println!("  device {k}: slots {slots:?}");
        }
    }
    Ok(())
}
