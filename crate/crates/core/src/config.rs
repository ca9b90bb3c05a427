//! Scenario configuration.
//!
//! Configs are flat `key = value` text, one entry per line, with `#`
//! comments. Every key has a default, so an empty file describes the
//! reference scenario: a 10×10 surface, `K = 10`, `S = 20`, 10 mW devices.
//!
//! [`Settings`] keeps the values exactly as written, which lets a manifest
//! reproduce a run byte for byte. [`Settings::scenario`] converts them
//! (dB to linear, angles, policy names) into a validated [`ScenarioConfig`].

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use crate::access::PolicyKind;
use crate::channel::{
    db_to_linear, dbm_to_watts, dbw_to_watts, phase_shift_set, NodePlacement, PhaseShiftSet,
    RadioParams, RisGeometry,
};
use crate::power::{FrameTiming, PowerParams};
use crate::{Error, Result};

/// Every recognised key with its default value.
pub const DEFAULTS: &[(&str, &str)] = &[
    ("scenario.k", "10"),
    ("scenario.s", "20"),
    ("sim.trials", "1000"),
    ("sim.seed", "1"),
    ("ris.n_x", "10"),
    ("ris.n_z", "10"),
    ("ris.d_x_m", "0.1"),
    ("ris.d_z_m", "0.1"),
    ("radio.wavelength_m", "0.1"),
    ("radio.mtd_tx_power_w", "0.01"),
    ("radio.noise_power_dbm", "-94"),
    ("radio.snr_threshold_db", "0"),
    ("ap.distance_m", "20"),
    ("ap.angle_rad", "pi/4"),
    ("ap.gain_db", "5"),
    ("mtd.d_min_m", "25"),
    ("mtd.d_max_m", "100"),
    ("mtd.angle_min_rad", "0"),
    ("mtd.angle_max_rad", "pi/2"),
    ("mtd.gain_db", "5"),
    ("policy.kind", "carp"),
    ("policy.sscp_s", "2"),
    ("estimation.c", "1"),
    ("estimation.noise_std", "0"),
    ("power.ap_xi", "1.2"),
    ("power.ap_tx_power_w", "0.1"),
    ("power.ap_static_dbw", "9"),
    ("power.mtd_xi", "1.2"),
    ("power.mtd_static_w", "0.04"),
    ("power.phase_shifter_mw", "1.5"),
    ("power.phase_shifter_bits", "3"),
    ("power.always_charge_training", "false"),
    ("timing.t_as_s", "1"),
    ("timing.r", "0.2"),
    ("run.policies", ""),
    ("sweep.axis", "K"),
    ("sweep.values", "2..20"),
    ("optimal.s_values", "1..40"),
];

/// Keys under this prefix are run metadata and are ignored on input.
pub const MANIFEST_PREFIX: &str = "manifest.";

// ── raw settings ───────────────────────────────────────────────────────

/// Raw key/value settings with every default materialised.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<&'static str, String>,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            values: DEFAULTS.iter().map(|&(k, v)| (k, v.to_string())).collect(),
        }
    }
}

impl Settings {
    /// Defaults overlaid with the entries of a config text.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut settings = Self::default();
        settings.apply_text(text)?;
        Ok(settings)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_text(&std::fs::read_to_string(path)?)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Syntax {
                line: i + 1,
                text: raw.trim().to_string(),
            })?;
            let key = key.trim();
            if key.starts_with(MANIFEST_PREFIX) {
                continue;
            }
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn apply_override(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment.split_once('=').ok_or_else(|| Error::Syntax {
            line: 0,
            text: assignment.to_string(),
        })?;
        self.set(key.trim(), value)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let slot = self
            .values
            .iter_mut()
            .find(|(k, _)| **k == key)
            .ok_or_else(|| Error::UnknownKey(key.to_string()))?;
        *slot.1 = value.trim().trim_matches('"').to_string();
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    fn raw(&self, key: &'static str) -> &str {
        self.values.get(key).map(String::as_str).expect("every key has a default")
    }

    fn parse<T: std::str::FromStr>(&self, key: &'static str) -> Result<T>
    where
        T::Err: fmt::Display,
    {
        let value = self.raw(key);
        value.parse().map_err(|e: T::Err| Error::Parse {
            key: key.into(),
            value: value.into(),
            reason: e.to_string(),
        })
    }

    fn real(&self, key: &'static str) -> Result<f64> {
        let value = self.raw(key);
        parse_real(value).ok_or_else(|| Error::Parse {
            key: key.into(),
            value: value.into(),
            reason: "expected a number (or pi, pi/x, x*pi)".into(),
        })
    }

    /// The configured policy list (`run.policies`), in canonical order.
    /// Falls back to `policy.kind` when the list is empty.
    pub fn policies(&self) -> Result<Vec<PolicyKind>> {
        if self.raw("run.policies").trim().is_empty() {
            return Ok(vec![self.resolve()?.policy]);
        }
        let s: usize = self.parse("policy.sscp_s")?;
        let mut list = self
            .raw("run.policies")
            .split(',')
            .filter(|p| !p.trim().is_empty())
            .map(|p| {
                p.parse().map(|kind| match kind {
                    PolicyKind::Sscp { .. } if !p.contains(':') => PolicyKind::Sscp { s },
                    other => other,
                })
            })
            .collect::<Result<Vec<PolicyKind>>>()?;
        list.sort();
        list.dedup();
        Ok(list)
    }

    /// Converts to a validated scenario.
    pub fn scenario(&self) -> Result<ScenarioConfig> {
        let cfg = self.resolve()?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Converts units and parses every key without range validation, for
    /// callers that substitute the policy or an axis value first.
    pub fn resolve(&self) -> Result<ScenarioConfig> {
        let sscp_s: usize = self.parse("policy.sscp_s")?;
        let policy = match self.raw("policy.kind").parse()? {
            PolicyKind::Sscp { .. } if !self.raw("policy.kind").contains(':') => PolicyKind::Sscp { s: sscp_s },
            other => other,
        };
        Ok(ScenarioConfig {
            devices: self.parse("scenario.k")?,
            slots: self.parse("scenario.s")?,
            trials: self.parse("sim.trials")?,
            seed: self.parse("sim.seed")?,
            ris_n_x: self.parse("ris.n_x")?,
            ris_n_z: self.parse("ris.n_z")?,
            ris_d_x_m: self.real("ris.d_x_m")?,
            ris_d_z_m: self.real("ris.d_z_m")?,
            wavelength_m: self.real("radio.wavelength_m")?,
            mtd_tx_power_w: self.real("radio.mtd_tx_power_w")?,
            noise_power_w: dbm_to_watts(self.real("radio.noise_power_dbm")?),
            snr_threshold: db_to_linear(self.real("radio.snr_threshold_db")?),
            ap_distance_m: self.real("ap.distance_m")?,
            ap_angle_rad: self.real("ap.angle_rad")?,
            ap_gain: db_to_linear(self.real("ap.gain_db")?),
            mtd_distance_m: (self.real("mtd.d_min_m")?, self.real("mtd.d_max_m")?),
            mtd_angle_rad: (self.real("mtd.angle_min_rad")?, self.real("mtd.angle_max_rad")?),
            mtd_gain: db_to_linear(self.real("mtd.gain_db")?),
            policy,
            estimation_c: self.real("estimation.c")?,
            estimation_noise_std: self.real("estimation.noise_std")?,
            ap_xi: self.real("power.ap_xi")?,
            ap_tx_power_w: self.real("power.ap_tx_power_w")?,
            ap_static_w: dbw_to_watts(self.real("power.ap_static_dbw")?),
            mtd_xi: self.real("power.mtd_xi")?,
            mtd_static_w: self.real("power.mtd_static_w")?,
            phase_shifter_w: self.real("power.phase_shifter_mw")? * 1e-3,
            phase_shifter_bits: self.parse("power.phase_shifter_bits")?,
            always_charge_training: self.parse("power.always_charge_training")?,
            access_slot_s: self.real("timing.t_as_s")?,
            training_ratio: self.real("timing.r")?,
        })
    }

    /// Renders every entry as `key = value` lines, sorted by key.
    pub fn to_text(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (*k, v.as_str()))
    }
}

/// Parses a real number, also accepting `pi`, `pi/x` and `x*pi`.
pub fn parse_real(text: &str) -> Option<f64> {
    let t = text.trim().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return v.is_finite().then_some(v);
    }
    if t == "pi" {
        return Some(PI);
    }
    if let Some(den) = t.strip_prefix("pi/") {
        return den.trim().parse::<f64>().ok().filter(|d| *d != 0.0).map(|d| PI / d);
    }
    if let Some(num) = t.strip_suffix("*pi") {
        return num.trim().parse::<f64>().ok().map(|n| n * PI);
    }
    None
}

/// Parses `a..b`, `a..b:step` (inclusive integer ranges) or `x,y,z`.
pub fn parse_values(text: &str) -> Option<Vec<f64>> {
    let t = text.trim();
    if let Some((lo, rest)) = t.split_once("..") {
        let (hi, step) = rest.split_once(':').unwrap_or((rest, "1"));
        let (lo, hi, step): (i64, i64, i64) = (lo.trim().parse().ok()?, hi.trim().parse().ok()?, step.trim().parse().ok()?);
        if step <= 0 || lo > hi {
            return None;
        }
        return Some((lo..=hi).step_by(step as usize).map(|v| v as f64).collect());
    }
    t.split(',').map(parse_real).collect::<Option<Vec<f64>>>().filter(|v| !v.is_empty())
}

// ── resolved scenario ──────────────────────────────────────────────────

/// A fully resolved scenario, in linear units.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// K, contending devices per frame.
    pub devices: usize,
    /// S, slots per block (and surface configurations).
    pub slots: usize,
    pub trials: u64,
    pub seed: u64,
    pub ris_n_x: usize,
    pub ris_n_z: usize,
    pub ris_d_x_m: f64,
    pub ris_d_z_m: f64,
    pub wavelength_m: f64,
    pub mtd_tx_power_w: f64,
    pub noise_power_w: f64,
    /// Linear SNR threshold.
    pub snr_threshold: f64,
    pub ap_distance_m: f64,
    pub ap_angle_rad: f64,
    pub ap_gain: f64,
    /// Closed range devices are placed in.
    pub mtd_distance_m: (f64, f64),
    pub mtd_angle_rad: (f64, f64),
    pub mtd_gain: f64,
    pub policy: PolicyKind,
    pub estimation_c: f64,
    pub estimation_noise_std: f64,
    pub ap_xi: f64,
    pub ap_tx_power_w: f64,
    pub ap_static_w: f64,
    pub mtd_xi: f64,
    pub mtd_static_w: f64,
    pub phase_shifter_w: f64,
    pub phase_shifter_bits: u32,
    pub always_charge_training: bool,
    pub access_slot_s: f64,
    pub training_ratio: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Settings::default().scenario().expect("defaults are valid")
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.devices == 0 {
            return Err(Error::invalid("scenario.k", "need at least one contending device"));
        }
        if self.slots == 0 {
            return Err(Error::invalid("scenario.s", "need at least one slot"));
        }
        if self.trials == 0 {
            return Err(Error::invalid("sim.trials", "need at least one trial"));
        }
        if self.trials - 1 > crate::rng::MAX_TRIAL {
            return Err(Error::invalid("sim.trials", "at most 2^56 trials"));
        }
        self.policy.validate(self.slots)?;
        self.geometry()?;
        self.ap()?;
        self.radio()?;
        self.power()?.validate()?;
        self.timing()?;
        if self.estimation_noise_std.is_nan() || self.estimation_noise_std < 0.0 {
            return Err(Error::invalid("estimation.noise_std", "must be >= 0"));
        }
        if !self.estimation_c.is_finite() {
            return Err(Error::invalid("estimation.c", "must be finite"));
        }
        let (d_min, d_max) = self.mtd_distance_m;
        if !(d_min > 0.0 && d_min <= d_max && d_max.is_finite()) {
            return Err(Error::invalid("mtd.d_min_m", format!("need 0 < d_min <= d_max, got [{d_min}, {d_max}]")));
        }
        let (a_min, a_max) = self.mtd_angle_rad;
        if !(0.0 <= a_min && a_min <= a_max && a_max <= PI / 2.0 + 1e-12) {
            return Err(Error::invalid("mtd.angle_min_rad", format!("need 0 <= min <= max <= pi/2, got [{a_min}, {a_max}]")));
        }
        if !(self.mtd_gain > 0.0 && self.mtd_gain.is_finite()) {
            return Err(Error::invalid("mtd.gain_db", "gain must be finite"));
        }
        Ok(())
    }

    pub fn elements(&self) -> usize {
        self.ris_n_x * self.ris_n_z
    }

    pub fn geometry(&self) -> Result<RisGeometry> {
        RisGeometry::new(self.ris_n_x, self.ris_n_z, self.ris_d_x_m, self.ris_d_z_m, self.wavelength_m)
    }

    pub fn ap(&self) -> Result<NodePlacement> {
        NodePlacement::new(self.ap_distance_m, self.ap_angle_rad, self.ap_gain)
    }

    pub fn radio(&self) -> Result<RadioParams> {
        RadioParams::new(self.mtd_tx_power_w, self.noise_power_w, self.snr_threshold)
    }

    pub fn phases(&self) -> Result<PhaseShiftSet> {
        phase_shift_set(self.slots)
    }

    pub fn power(&self) -> Result<PowerParams> {
        let p = PowerParams {
            ap_pa_inverse_eff: self.ap_xi,
            ap_tx_power: self.ap_tx_power_w,
            ap_static: self.ap_static_w,
            mtd_pa_inverse_eff: self.mtd_xi,
            mtd_tx_power: self.mtd_tx_power_w,
            mtd_static: self.mtd_static_w,
            phase_shifter_power: self.phase_shifter_w,
            phase_shifter_bits: self.phase_shifter_bits,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn timing(&self) -> Result<FrameTiming> {
        FrameTiming::new(self.access_slot_s, self.training_ratio, self.slots)
    }

    /// Training ratio applied to throughput: `r` for CARP/s-SCP, `0` otherwise.
    pub fn effective_training_ratio(&self) -> f64 {
        if self.policy.requires_training() {
            self.training_ratio
        } else {
            0.0
        }
    }
}
