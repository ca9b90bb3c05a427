//! Link budget through the RIS for one device: path loss, array factor
//! per configuration, and the resulting SNR in dB.

use ris_ra::channel::{
    array_factor, array_factor_closed_form, channel_coefficient, linear_to_db, path_loss, phase_shift_set, snr,
};
use ris_ra::config::ScenarioConfig;

fn main() -> ris_ra::Result<()> {
    let cfg = ScenarioConfig::default();
    let ris = cfg.geometry()?;
    let ap = cfg.ap()?;
    let radio = cfg.radio()?;
    let phases = phase_shift_set(8)?;
    let device = ris_ra::channel::NodePlacement::new(40.0, 0.5, cfg.mtd_gain)?;

    println!("N = {} elements, path loss {:.3} dB", ris.elements(), linear_to_db(path_loss(&ris, &ap, &device)));
    println!("{:>8} {:>10} {:>10} {:>9}", "theta_s", "|Omega|", "closed", "SNR dB");
    for &theta_s in phases.angles() {
        let omega = array_factor(&ris, device.angle(), theta_s);
        let closed = array_factor_closed_form(&ris, device.angle(), theta_s);
        let h = channel_coefficient(&ris, &ap, &device, theta_s);
        println!(
            "{theta_s:>8.4} {:>10.4} {:>10.4} {:>9.2}",
            omega.norm(),
            closed.norm(),
            linear_to_db(snr(&radio, h))
        );
    }
    Ok(())
}
