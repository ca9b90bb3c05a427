//! Deterministic RIS-aided channel model.
//!
//! The surface lies in the xz-plane centred on the origin. The access point
//! and the devices sit in the xy-plane and see each other only through the
//! surface. Reflection does not depend on the z-dimension, so the array
//! factor sums over the `n_x` columns and scales by `n_z`.
//!
//! All quantities are linear; dB values are converted once, at config
//! parsing, with the helpers at the bottom of this module.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use rand::Rng;

use crate::{Error, Result};

/// Slack allowed when validating angles against `[0, π/2]`.
const ANGLE_SLACK: f64 = 1e-12;

// ── geometry ───────────────────────────────────────────────────────────

/// A planar surface of `n_x × n_z` reflecting elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisGeometry {
    n_x: usize,
    n_z: usize,
    d_x: f64,
    d_z: f64,
    wavelength: f64,
}

impl RisGeometry {
    /// Element sides must be positive and no larger than the wavelength.
    pub fn new(n_x: usize, n_z: usize, d_x: f64, d_z: f64, wavelength: f64) -> Result<Self> {
        if n_x == 0 || n_z == 0 {
            return Err(Error::invalid("ris.n_x/ris.n_z", "element counts must be >= 1"));
        }
        if !(wavelength > 0.0 && wavelength.is_finite()) {
            return Err(Error::invalid("radio.wavelength_m", "must be positive"));
        }
        for (name, side) in [("ris.d_x_m", d_x), ("ris.d_z_m", d_z)] {
            if !(side > 0.0 && side <= wavelength) {
                return Err(Error::invalid(
                    name,
                    format!("element side {side} m must lie in (0, wavelength = {wavelength} m]"),
                ));
            }
        }
        Ok(Self {
            n_x,
            n_z,
            d_x,
            d_z,
            wavelength,
        })
    }

    /// Square surface with `side × side` elements.
    pub fn square(side: usize, d: f64, wavelength: f64) -> Result<Self> {
        Self::new(side, side, d, d, wavelength)
    }

    pub fn n_x(&self) -> usize {
        self.n_x
    }

    pub fn n_z(&self) -> usize {
        self.n_z
    }

    pub fn d_x(&self) -> f64 {
        self.d_x
    }

    pub fn d_z(&self) -> f64 {
        self.d_z
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// Total element count `N = n_x · n_z`.
    pub fn elements(&self) -> usize {
        self.n_x * self.n_z
    }

    /// Wavenumber `ω = 2π / λ`.
    pub fn wavenumber(&self) -> f64 {
        2.0 * PI / self.wavelength
    }
}

/// Polar position of a node relative to the surface centre, plus its antenna gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodePlacement {
    distance: f64,
    angle: f64,
    antenna_gain: f64,
}

impl NodePlacement {
    /// `distance > 0`, `angle ∈ [0, π/2]` (radians from boresight), linear `antenna_gain > 0`.
    pub fn new(distance: f64, angle: f64, antenna_gain: f64) -> Result<Self> {
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(Error::invalid("distance", format!("{distance} m must be positive")));
        }
        if !(-ANGLE_SLACK..=FRAC_PI_2 + ANGLE_SLACK).contains(&angle) {
            return Err(Error::invalid("angle", format!("{angle} rad outside [0, pi/2]")));
        }
        if !(antenna_gain > 0.0 && antenna_gain.is_finite()) {
            return Err(Error::invalid("antenna_gain", "linear gain must be positive"));
        }
        Ok(Self {
            distance,
            angle: angle.clamp(0.0, FRAC_PI_2),
            antenna_gain,
        })
    }

    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }

    pub fn antenna_gain(&self) -> f64 {
        self.antenna_gain
    }
}

/// The `S` phase-shift configurations the surface cycles through, one per slot.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseShiftSet(Vec<f64>);

impl PhaseShiftSet {
    pub fn angles(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Uplink radio parameters, all linear.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioParams {
    mtd_tx_power: f64,
    noise_power: f64,
    snr_threshold: f64,
}

impl RadioParams {
    pub fn new(mtd_tx_power: f64, noise_power: f64, snr_threshold: f64) -> Result<Self> {
        for (name, v) in [
            ("radio.mtd_tx_power_w", mtd_tx_power),
            ("radio.noise_power", noise_power),
            ("radio.snr_threshold", snr_threshold),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("{v} must be positive")));
            }
        }
        Ok(Self {
            mtd_tx_power,
            noise_power,
            snr_threshold,
        })
    }

    /// Device transmit power in watts.
    pub fn mtd_tx_power(&self) -> f64 {
        self.mtd_tx_power
    }

    /// Receiver noise power in watts.
    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// Linear SNR a singleton replica must reach to be decoded.
    pub fn snr_threshold(&self) -> f64 {
        self.snr_threshold
    }
}

/// `K × S` grid of per-device, per-slot values, stored row-major by device.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrMatrix {
    devices: usize,
    slots: usize,
    values: Vec<f64>,
}

impl SnrMatrix {
    pub fn new(devices: usize, slots: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != devices * slots {
            return Err(Error::Dimension(format!(
                "{} values for a {devices}x{slots} matrix",
                values.len()
            )));
        }
        Ok(Self {
            devices,
            slots,
            values,
        })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let slots = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != slots) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(rows.len(), slots, rows.concat())
    }

    /// Every entry equal to `value`.
    pub fn filled(devices: usize, slots: usize, value: f64) -> Self {
        Self {
            devices,
            slots,
            values: vec![value; devices * slots],
        }
    }

    pub fn devices(&self) -> usize {
        self.devices
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn get(&self, device: usize, slot: usize) -> f64 {
        self.values[device * self.slots + slot]
    }

    pub fn row(&self, device: usize) -> &[f64] {
        &self.values[device * self.slots..(device + 1) * self.slots]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

// ── channel model ──────────────────────────────────────────────────────

/// Phase-shift configurations `θ_s = π(s−1) / (2(S−1))` for `s = 1..S`.
///
/// The formula is 0/0 at `S = 1`; the single configuration is then `0`.
pub fn phase_shift_set(slots: usize) -> Result<PhaseShiftSet> {
    match slots {
        0 => Err(Error::invalid("S", "number of slots must be >= 1")),
        1 => Ok(PhaseShiftSet(vec![0.0])),
        _ => {
            let denom = 2.0 * (slots - 1) as f64;
            let mut angles: Vec<f64> = (0..slots).map(|i| PI * i as f64 / denom).collect();
            // Pin the last endpoint; π(S−1)/(2(S−1)) can round one ulp off π/2.
            angles[slots - 1] = FRAC_PI_2;
            Ok(PhaseShiftSet(angles))
        }
    }
}

/// Path loss `β_k` of the AP–surface–device link.
pub fn path_loss(ris: &RisGeometry, ap: &NodePlacement, mtd: &NodePlacement) -> f64 {
    let aperture = ris.d_x * ris.d_z / (ap.distance * mtd.distance);
    let cos_k = mtd.angle.cos();
    ap.antenna_gain * mtd.antenna_gain / (4.0 * PI).powi(2) * aperture * aperture * cos_k * cos_k
}

/// Total propagation phase `ψ_k`, unwrapped.
pub fn total_phase(ris: &RisGeometry, ap: &NodePlacement, mtd: &NodePlacement) -> f64 {
    let centre_offset = (ris.n_x as f64 + 1.0) / 2.0 * ris.d_x;
    ris.wavenumber()
        * (ap.distance + mtd.distance - (ap.angle.sin() - mtd.angle.sin()) * centre_offset)
}

/// Array factor `Ω = n_z Σ_{n=1}^{n_x} exp(jω(sin θ_k − sin θ_s) n d_x)`, by direct summation.
pub fn array_factor(ris: &RisGeometry, theta_k: f64, theta_s: f64) -> Complex64 {
    let step = ris.wavenumber() * (theta_k.sin() - theta_s.sin()) * ris.d_x;
    let ratio = Complex64::from_polar(1.0, step);
    let mut term = ratio;
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..ris.n_x {
        sum += term;
        term *= ratio;
    }
    sum * ris.n_z as f64
}

/// Geometric-series form of [`array_factor`].
///
/// Falls back to the direct sum when the per-element phase step is within
/// `1e-6` of a multiple of `2π`, where the ratio loses precision.
pub fn array_factor_closed_form(ris: &RisGeometry, theta_k: f64, theta_s: f64) -> Complex64 {
    let step = ris.wavenumber() * (theta_k.sin() - theta_s.sin()) * ris.d_x;
    let ratio = Complex64::from_polar(1.0, step);
    let denom = Complex64::new(1.0, 0.0) - ratio;
    if denom.norm() < 1e-6 {
        return array_factor(ris, theta_k, theta_s);
    }
    let numer = Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, step * ris.n_x as f64);
    ratio * numer / denom * ris.n_z as f64
}

/// Channel coefficient `h_k(s) = sqrt(β_k) e^{jψ_k} Ω_k(s)` for configuration `theta_s`.
pub fn channel_coefficient(
    ris: &RisGeometry,
    ap: &NodePlacement,
    mtd: &NodePlacement,
    theta_s: f64,
) -> Complex64 {
    let amplitude = path_loss(ris, ap, mtd).sqrt();
    let phase = Complex64::from_polar(1.0, total_phase(ris, ap, mtd));
    phase * array_factor(ris, mtd.angle, theta_s) * amplitude
}

/// Received SNR `γ = ρ_MTD |h|² / σ²`.
pub fn snr(radio: &RadioParams, h: Complex64) -> f64 {
    radio.mtd_tx_power * h.norm_sqr() / radio.noise_power
}

/// SNR of every device under every configuration.
pub fn snr_matrix(
    ris: &RisGeometry,
    ap: &NodePlacement,
    mtds: &[NodePlacement],
    phases: &PhaseShiftSet,
    radio: &RadioParams,
) -> SnrMatrix {
    let slots = phases.len();
    let mut values = Vec::with_capacity(mtds.len() * slots);
    for mtd in mtds {
        for &theta_s in phases.angles() {
            values.push(snr(radio, channel_coefficient(ris, ap, mtd, theta_s)));
        }
    }
    SnrMatrix {
        devices: mtds.len(),
        slots,
        values,
    }
}

// ── placements ─────────────────────────────────────────────────────────

/// Draws `count` device placements with distance and angle independently
/// uniform over the given closed ranges.
pub fn sample_mtd_placements<R: Rng + ?Sized>(
    rng: &mut R,
    count: usize,
    distance_range: (f64, f64),
    angle_range: (f64, f64),
    gain: f64,
) -> Result<Vec<NodePlacement>> {
    let (d_min, d_max) = distance_range;
    let (a_min, a_max) = angle_range;
    if !(d_min > 0.0 && d_min <= d_max && d_max.is_finite()) {
        return Err(Error::invalid(
            "mtd.d_min_m/mtd.d_max_m",
            format!("need 0 < d_min <= d_max, got [{d_min}, {d_max}]"),
        ));
    }
    if !(0.0 <= a_min && a_min <= a_max && a_max <= FRAC_PI_2 + ANGLE_SLACK) {
        return Err(Error::invalid(
            "mtd.angle_min_rad/mtd.angle_max_rad",
            format!("need 0 <= min <= max <= pi/2, got [{a_min}, {a_max}]"),
        ));
    }
    let mut draw = |lo: f64, hi: f64| if lo == hi { lo } else { rng.random_range(lo..=hi) };
    (0..count)
        .map(|_| {
            let d = draw(d_min, d_max);
            let a = draw(a_min, a_max);
            NodePlacement::new(d, a, gain)
        })
        .collect()
}

// ── units ──────────────────────────────────────────────────────────────

/// Power ratio from dB.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

/// Watts from dBm.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// Watts from dBW.
pub fn dbw_to_watts(dbw: f64) -> f64 {
    db_to_linear(dbw)
}

pub fn watts_to_dbw(watts: f64) -> f64 {
    linear_to_db(watts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_6, FRAC_PI_8};

    fn table_ris(side: usize) -> RisGeometry {
        RisGeometry::square(side, 0.1, 0.1).unwrap()
    }

    fn ap() -> NodePlacement {
        NodePlacement::new(20.0, FRAC_PI_4, db_to_linear(5.0)).unwrap()
    }

    fn mtd(d: f64, angle: f64) -> NodePlacement {
        NodePlacement::new(d, angle, db_to_linear(5.0)).unwrap()
    }

    /// Term-by-term oracle, written independently of `array_factor`.
    fn array_factor_oracle(n_x: usize, n_z: usize, d_x: f64, lambda: f64, tk: f64, ts: f64) -> (f64, f64) {
        let (mut re, mut im) = (0.0, 0.0);
        for n in 1..=n_x {
            let arg = 2.0 * PI / lambda * (tk.sin() - ts.sin()) * n as f64 * d_x;
            re += arg.cos();
            im += arg.sin();
        }
        (re * n_z as f64, im * n_z as f64)
    }

    #[test]
    fn phase_sets() {
        let five = phase_shift_set(5).unwrap();
        let expect = [0.0, FRAC_PI_8, FRAC_PI_4, 3.0 * FRAC_PI_8, FRAC_PI_2];
        for (a, e) in five.angles().iter().zip(expect) {
            assert_relative_eq!(*a, e, epsilon = 1e-15);
        }
        assert_eq!(phase_shift_set(2).unwrap().angles(), &[0.0, FRAC_PI_2]);
        assert_eq!(phase_shift_set(1).unwrap().angles(), &[0.0]);
        assert!(phase_shift_set(0).is_err());
    }

    #[test]
    fn geometry_validation() {
        assert!(RisGeometry::new(0, 1, 0.1, 0.1, 0.1).is_err());
        assert!(RisGeometry::new(1, 1, 0.2, 0.1, 0.1).is_err());
        assert!(RisGeometry::new(1, 1, 0.1, 0.0, 0.1).is_err());
        let g = RisGeometry::new(4, 5, 0.05, 0.1, 0.1).unwrap();
        assert_eq!(g.elements(), 20);
        assert!(NodePlacement::new(0.0, 0.0, 1.0).is_err());
        assert!(NodePlacement::new(1.0, 2.0, 1.0).is_err());
        assert!(NodePlacement::new(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn path_loss_values() {
        let ris = table_ris(10);
        assert_relative_eq!(path_loss(&ris, &ap(), &mtd(25.0, 0.0)), 2.5330295910584452e-11, max_relative = 1e-12);
        assert!(path_loss(&ris, &ap(), &mtd(25.0, FRAC_PI_2)) < 1e-40);
        let near = path_loss(&ris, &ap(), &mtd(30.0, 0.4));
        let far = path_loss(&ris, &ap(), &mtd(60.0, 0.4));
        assert_relative_eq!(near / far, 4.0, max_relative = 1e-12);
    }

    #[test]
    fn total_phase_values() {
        let ris = table_ris(10);
        assert_relative_eq!(total_phase(&ris, &ap(), &mtd(25.0, 0.0)), 2802.9975320709427, max_relative = 1e-12);
        let same = mtd(25.0, FRAC_PI_4);
        assert_relative_eq!(total_phase(&ris, &ap(), &same), ris.wavenumber() * 45.0, max_relative = 1e-14);
    }

    #[test]
    fn array_factor_against_oracle() {
        let ris = table_ris(10);
        assert_relative_eq!(array_factor(&ris, 0.7, 0.7).re, 100.0, epsilon = 1e-12);
        for (tk, ts) in [(FRAC_PI_6, 0.0), (0.3, 0.1), (1.2, 0.25), (0.0, FRAC_PI_2)] {
            let (re, im) = array_factor_oracle(10, 10, 0.1, 0.1, tk, ts);
            let got = array_factor(&ris, tk, ts);
            assert!((got.re - re).abs() <= 1e-12 * 100.0, "{tk} {ts}");
            assert!((got.im - im).abs() <= 1e-12 * 100.0, "{tk} {ts}");
            assert_relative_eq!(
                array_factor(&ris, tk, ts).norm(),
                array_factor(&ris, ts, tk).norm(),
                epsilon = 1e-10
            );
        }
    }

    #[test]
    fn closed_form_matches_sum() {
        let ris = RisGeometry::new(13, 7, 0.03, 0.05, 0.1).unwrap();
        for i in 0..50 {
            let tk = i as f64 * 0.031;
            let ts = 1.5 - i as f64 * 0.017;
            let a = array_factor(&ris, tk, ts);
            let b = array_factor_closed_form(&ris, tk, ts);
            assert!((a - b).norm() <= 1e-10 * ris.elements() as f64, "{tk} {ts}");
        }
    }

    #[test]
    fn channel_and_snr_chain() {
        let ris = table_ris(10);
        let radio = RadioParams::new(0.01, dbm_to_watts(-94.0), 1.0).unwrap();
        let m = mtd(25.0, 0.3);
        let h = channel_coefficient(&ris, &ap(), &m, 0.1);
        assert_relative_eq!(h.re, -4.312923962177895e-06, max_relative = 1e-9);
        assert_relative_eq!(h.im, 1.0402855416297895e-05, max_relative = 1e-9);
        assert_relative_eq!(
            h.norm(),
            path_loss(&ris, &ap(), &m).sqrt() * array_factor(&ris, 0.3, 0.1).norm(),
            max_relative = 1e-12
        );

        let aligned = channel_coefficient(&ris, &ap(), &mtd(25.0, 0.0), 0.0);
        assert_relative_eq!(snr(&radio, aligned), 6362.682660391974, max_relative = 1e-9);
        assert_relative_eq!(snr(&radio, aligned.conj()), snr(&radio, aligned), max_relative = 1e-15);
        let doubled = RadioParams::new(0.02, radio.noise_power(), 1.0).unwrap();
        assert_relative_eq!(snr(&doubled, aligned), 2.0 * snr(&radio, aligned), max_relative = 1e-14);
        assert_eq!(snr(&radio, Complex64::new(0.0, 0.0)), 0.0);
    }

    #[test]
    fn units() {
        assert_eq!(db_to_linear(0.0), 1.0);
        assert_relative_eq!(dbm_to_watts(-94.0), 3.981071705534969e-13, max_relative = 1e-12);
        assert_relative_eq!(dbw_to_watts(9.0), 7.943282347242816, max_relative = 1e-12);
        assert_relative_eq!(watts_to_dbm(dbm_to_watts(-94.0)), -94.0, epsilon = 1e-12);
        assert_relative_eq!(watts_to_dbw(dbw_to_watts(9.0)), 9.0, epsilon = 1e-12);
    }

    #[test]
    fn placements() {
        let mut rng = crate::rng::seeded(1);
        let fixed = sample_mtd_placements(&mut rng, 20, (50.0, 50.0), (0.0, FRAC_PI_2), 1.0).unwrap();
        assert!(fixed.iter().all(|p| p.distance() == 50.0));
        assert!(sample_mtd_placements(&mut rng, 1, (0.0, 10.0), (0.0, 1.0), 1.0).is_err());
        assert!(sample_mtd_placements(&mut rng, 1, (20.0, 10.0), (0.0, 1.0), 1.0).is_err());
        let a = sample_mtd_placements(&mut crate::rng::seeded(9), 5, (25.0, 100.0), (0.0, FRAC_PI_2), 1.0).unwrap();
        let b = sample_mtd_placements(&mut crate::rng::seeded(9), 5, (25.0, 100.0), (0.0, FRAC_PI_2), 1.0).unwrap();
        assert_eq!(a, b);
    }
}
