//! Power consumed in one frame by the AP, the RIS and the devices, with and
//! without a training phase.

use ris_ra::config::ScenarioConfig;
use ris_ra::power::{ap_power, mtd_power, ris_power};

fn main() -> ris_ra::Result<()> {
    let cfg = ScenarioConfig::default();
    let params = cfg.power()?;
    let elements = cfg.elements();

    println!("P_RIS  ({elements} elements): {:.4} W", ris_power(elements, params.phase_shifter_power));
    println!("P_AP   with training:  {:.4} W", ap_power(&params, cfg.slots, true));
    println!("P_AP   training-free:  {:.4} W", ap_power(&params, cfg.slots, false));
    for replicas in 1..=4 {
        println!("P_MTD  {replicas} replica(s):     {:.4} W", mtd_power(&params, replicas));
    }
    Ok(())
}
