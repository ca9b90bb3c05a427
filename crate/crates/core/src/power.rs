//! Frame power consumption, throughput and energy efficiency.
//!
//! The AP pays a transmit term per training slot on top of its static
//! draw. The surface pays a fixed amount per phase shifter. Each device
//! pays per replica on top of its static draw. Training-free policies skip
//! both the AP training term and the training block's duration, unless the
//! caller asks to charge training power unconditionally.

use crate::{Error, Result};

/// Power model parameters, linear watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerParams {
    /// ξ_AP, inverse of the AP amplifier efficiency.
    pub ap_pa_inverse_eff: f64,
    /// ρ_AP, AP transmit power per training slot.
    pub ap_tx_power: f64,
    /// Static AP hardware draw.
    pub ap_static: f64,
    /// ξ_MTD, inverse of the device amplifier efficiency.
    pub mtd_pa_inverse_eff: f64,
    /// ρ_MTD, device transmit power per replica.
    pub mtd_tx_power: f64,
    /// Static device hardware draw.
    pub mtd_static: f64,
    /// Consumption of one `phase_shifter_bits`-bit phase shifter.
    pub phase_shifter_power: f64,
    pub phase_shifter_bits: u32,
}

impl PowerParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("power.ap_tx_power_w", self.ap_tx_power),
            ("power.ap_static_dbw", self.ap_static),
            ("radio.mtd_tx_power_w", self.mtd_tx_power),
            ("power.mtd_static_w", self.mtd_static),
            ("power.phase_shifter_mw", self.phase_shifter_power),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("power {v} W must be positive")));
            }
        }
        for (name, xi) in [("power.ap_xi", self.ap_pa_inverse_eff), ("power.mtd_xi", self.mtd_pa_inverse_eff)] {
            if !(xi > 1.0 && xi.is_finite()) {
                return Err(Error::invalid(name, format!("inverse PA efficiency {xi} must exceed 1")));
            }
        }
        if self.phase_shifter_bits == 0 {
            return Err(Error::invalid("power.phase_shifter_bits", "resolution must be >= 1 bit"));
        }
        Ok(())
    }
}

/// Slot durations of one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTiming {
    /// T_as, access slot duration in seconds.
    pub access_slot_s: f64,
    /// r = T_ts / T_as.
    pub training_ratio: f64,
    pub slots: usize,
}

impl FrameTiming {
    pub fn new(access_slot_s: f64, training_ratio: f64, slots: usize) -> Result<Self> {
        if !(access_slot_s > 0.0 && access_slot_s.is_finite()) {
            return Err(Error::invalid("timing.t_as_s", "access slot duration must be positive"));
        }
        if !(training_ratio >= 0.0 && training_ratio.is_finite()) {
            return Err(Error::invalid("timing.r", "training slot ratio must be >= 0"));
        }
        Ok(Self {
            access_slot_s,
            training_ratio,
            slots,
        })
    }

    /// The ratio actually applied: `r` with training, `0` without.
    pub fn effective_ratio(&self, training_used: bool) -> f64 {
        if training_used {
            self.training_ratio
        } else {
            0.0
        }
    }

    /// Frame length `(1 + r_eff) S T_as` in seconds.
    pub fn frame_duration(&self, training_used: bool) -> f64 {
        (1.0 + self.effective_ratio(training_used)) * self.slots as f64 * self.access_slot_s
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBreakdown {
    pub ap: f64,
    pub ris: f64,
    /// Sum over the contending devices.
    pub mtd: f64,
}

impl PowerBreakdown {
    pub fn total(&self) -> f64 {
        self.ap + self.ris + self.mtd
    }
}

/// Outcome metrics of one frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameMetrics {
    pub successes: usize,
    /// Packets per second.
    pub throughput: f64,
    pub power: PowerBreakdown,
    /// Packets per second per watt.
    pub energy_efficiency: f64,
}

/// AP consumption `S ξ_AP ρ_AP + P̄_AP`, or just `P̄_AP` without training.
pub fn ap_power(params: &PowerParams, slots: usize, training_used: bool) -> f64 {
    let transmit = if training_used {
        slots as f64 * params.ap_pa_inverse_eff * params.ap_tx_power
    } else {
        0.0
    };
    transmit + params.ap_static
}

/// Surface consumption `N P_n(b)`.
pub fn ris_power(elements: usize, phase_shifter_power: f64) -> f64 {
    elements as f64 * phase_shifter_power
}

/// Consumption of a device sending `replicas` copies: `s_k ξ_MTD ρ_MTD + P̄_MTD`.
pub fn mtd_power(params: &PowerParams, replicas: usize) -> f64 {
    replicas as f64 * params.mtd_pa_inverse_eff * params.mtd_tx_power + params.mtd_static
}

pub fn total_power(ap: f64, ris: f64, mtd: &[f64]) -> f64 {
    ap + ris + mtd.iter().sum::<f64>()
}

/// Throughput `G = A / ((1 + r_eff) S T_as)`.
pub fn throughput(successes: usize, timing: &FrameTiming, training_used: bool) -> f64 {
    if successes == 0 {
        return 0.0;
    }
    successes as f64 / timing.frame_duration(training_used)
}

/// Energy efficiency `G / P`.
pub fn energy_efficiency(throughput: f64, power: f64) -> Result<f64> {
    if power.is_nan() || power <= 0.0 {
        return Err(Error::invalid("power", format!("total power {power} W must be positive")));
    }
    Ok(throughput / power)
}

/// All frame metrics from the realised replica counts and success count.
///
/// `charge_training` decides whether the AP training term is paid;
/// `training_used` decides whether the training block counts in the frame time.
pub fn frame_metrics(
    params: &PowerParams,
    timing: &FrameTiming,
    elements: usize,
    replica_counts: &[usize],
    successes: usize,
    training_used: bool,
    charge_training: bool,
) -> Result<FrameMetrics> {
    let per_device: Vec<f64> = replica_counts.iter().map(|&s| mtd_power(params, s)).collect();
    let power = PowerBreakdown {
        ap: ap_power(params, timing.slots, charge_training),
        ris: ris_power(elements, params.phase_shifter_power),
        mtd: per_device.iter().sum(),
    };
    let g = throughput(successes, timing, training_used);
    Ok(FrameMetrics {
        successes,
        throughput: g,
        power,
        energy_efficiency: energy_efficiency(g, power.total())?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table() -> PowerParams {
        PowerParams {
            ap_pa_inverse_eff: 1.2,
            ap_tx_power: 0.1,
            ap_static: crate::channel::dbw_to_watts(9.0),
            mtd_pa_inverse_eff: 1.2,
            mtd_tx_power: 0.01,
            mtd_static: 0.04,
            phase_shifter_power: 1.5e-3,
            phase_shifter_bits: 3,
        }
    }

    #[test]
    fn ap_values() {
        let p = table();
        assert_relative_eq!(ap_power(&p, 20, true), 10.343282347242816, max_relative = 1e-12);
        assert_eq!(ap_power(&p, 20, false), p.ap_static);
        assert_eq!(ap_power(&p, 0, true), p.ap_static);
        assert!(ap_power(&p, 21, true) > ap_power(&p, 20, true));
    }

    #[test]
    fn ris_and_mtd_values() {
        assert_relative_eq!(ris_power(100, 1.5e-3), 0.15, max_relative = 1e-15);
        assert_eq!(ris_power(1, 1.5e-3), 1.5e-3);
        assert_eq!(ris_power(200, 1.5e-3), 2.0 * ris_power(100, 1.5e-3));
        let p = table();
        assert_relative_eq!(mtd_power(&p, 2), 0.064, max_relative = 1e-15);
        assert_relative_eq!(mtd_power(&p, 2) - mtd_power(&p, 1), 1.2 * 0.01, max_relative = 1e-12);
        let quiet = PowerParams { mtd_tx_power: 1e-300, ..p };
        assert_relative_eq!(mtd_power(&quiet, 3), 0.04, max_relative = 1e-15);
    }

    #[test]
    fn totals_and_rates() {
        let p = table();
        assert_eq!(total_power(1.0, 0.5, &[]), 1.5);
        let devices = vec![mtd_power(&p, 2); 10];
        let total = total_power(ap_power(&p, 20, true), ris_power(100, 1.5e-3), &devices);
        assert_relative_eq!(total, 11.133282347242817, max_relative = 1e-12);
        assert_eq!(total_power(1.0, 0.0, &[0.1, 0.2, 0.3]), total_power(1.0, 0.0, &[0.3, 0.1, 0.2]));

        let timing = FrameTiming::new(1.0, 0.2, 20).unwrap();
        assert_relative_eq!(throughput(10, &timing, true), 10.0 / 24.0, max_relative = 1e-15);
        assert_eq!(throughput(0, &timing, true), 0.0);
        assert_eq!(throughput(10, &timing, false), 0.5);

        let ee = energy_efficiency(10.0 / 24.0, total).unwrap();
        assert_relative_eq!(ee, 0.03742532109318643, max_relative = 1e-12);
        assert_eq!(energy_efficiency(0.0, total).unwrap(), 0.0);
        assert_eq!(energy_efficiency(2.0, 4.0).unwrap(), 2.0 * energy_efficiency(1.0, 4.0).unwrap());
        assert!(energy_efficiency(1.0, 0.0).is_err());
    }

    #[test]
    fn frame_metrics_consistent() {
        let p = table();
        let timing = FrameTiming::new(1.0, 0.2, 20).unwrap();
        let m = frame_metrics(&p, &timing, 100, &[2; 10], 10, true, true).unwrap();
        assert_relative_eq!(m.power.total(), 11.133282347242817, max_relative = 1e-12);
        assert_relative_eq!(m.energy_efficiency * m.power.total(), m.throughput, max_relative = 1e-12);
        let free = frame_metrics(&p, &timing, 100, &[2; 10], 10, false, false).unwrap();
        assert_eq!(free.power.ap, p.ap_static);
        assert_eq!(free.throughput, 0.5);
    }

    #[test]
    fn validation() {
        assert!(table().validate().is_ok());
        assert!(PowerParams { ap_pa_inverse_eff: 1.0, ..table() }.validate().is_err());
        assert!(PowerParams { mtd_static: 0.0, ..table() }.validate().is_err());
        assert!(FrameTiming::new(0.0, 0.2, 5).is_err());
        assert!(FrameTiming::new(1.0, -0.1, 5).is_err());
    }
}
