//! Downlink quality measurement and the uplink access policies.
//!
//! Slot indices are zero-based throughout the crate: slot `0` uses the first
//! phase-shift configuration.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::channel::SnrMatrix;
use crate::{Error, Result};

// ── quality measurement ────────────────────────────────────────────────

/// Channel qualities `q_k(s)` measured by the devices during training.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityMatrix {
    values: SnrMatrix,
    c: Vec<f64>,
    noise_std: Vec<f64>,
}

impl QualityMatrix {
    /// Perfect estimation: the quality grid is the SNR grid.
    pub fn perfect(snr: &SnrMatrix) -> Self {
        Self {
            values: snr.clone(),
            c: vec![1.0; snr.devices()],
            noise_std: vec![0.0; snr.devices()],
        }
    }

    pub fn devices(&self) -> usize {
        self.values.devices()
    }

    pub fn slots(&self) -> usize {
        self.values.slots()
    }

    pub fn get(&self, device: usize, slot: usize) -> f64 {
        self.values.get(device, slot)
    }

    pub fn row(&self, device: usize) -> &[f64] {
        self.values.row(device)
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    pub fn noise_std(&self) -> &[f64] {
        &self.noise_std
    }
}

/// Measures `q_k(s) = c_k γ_k(s) + ε_k(s)` with Gaussian `ε_k(s) ~ N(0, σ_k²)`.
///
/// `c` and `noise_std` hold one entry per device. Negative measurements are
/// clamped to zero so that they remain valid CARP weights.
pub fn measure_quality<R: Rng + ?Sized>(
    snr: &SnrMatrix,
    c: &[f64],
    noise_std: &[f64],
    rng: &mut R,
) -> Result<QualityMatrix> {
    let k = snr.devices();
    if c.len() != k || noise_std.len() != k {
        return Err(Error::Dimension(format!(
            "{k} devices but {} quality constants and {} noise deviations",
            c.len(),
            noise_std.len()
        )));
    }
    if let Some(bad) = noise_std.iter().find(|s| !(**s >= 0.0 && s.is_finite())) {
        return Err(Error::invalid("estimation.noise_std", format!("{bad} must be >= 0")));
    }
    let mut values = Vec::with_capacity(snr.values().len());
    for device in 0..k {
        let noise = (noise_std[device] > 0.0)
            .then(|| Normal::new(0.0, noise_std[device]).expect("finite positive deviation"));
        for &gamma in snr.row(device) {
            let eps = noise.as_ref().map_or(0.0, |n| n.sample(rng));
            values.push((c[device] * gamma + eps).max(0.0));
        }
    }
    Ok(QualityMatrix {
        values: SnrMatrix::new(k, snr.slots(), values)?,
        c: c.to_vec(),
        noise_std: noise_std.to_vec(),
    })
}

// ── decisions ──────────────────────────────────────────────────────────

/// Per-device sets of access slots, each sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessDecision {
    slots: usize,
    per_device: Vec<Vec<usize>>,
}

impl AccessDecision {
    /// Validates that each set is nonempty, in range and duplicate-free.
    pub fn new(slots: usize, mut per_device: Vec<Vec<usize>>) -> Result<Self> {
        for (k, set) in per_device.iter_mut().enumerate() {
            set.sort_unstable();
            if set.is_empty() {
                return Err(Error::invalid("access decision", format!("device {k} selected no slot")));
            }
            if set.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::invalid("access decision", format!("device {k} repeats a slot")));
            }
            if *set.last().unwrap() >= slots {
                return Err(Error::invalid(
                    "access decision",
                    format!("device {k} selected a slot outside 0..{slots}"),
                ));
            }
        }
        Ok(Self { slots, per_device })
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn devices(&self) -> usize {
        self.per_device.len()
    }

    /// Slots chosen by `device`.
    pub fn slots_of(&self, device: usize) -> &[usize] {
        &self.per_device[device]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> {
        self.per_device.iter().map(Vec::as_slice)
    }

    /// Replica count `s_k` per device.
    pub fn replica_counts(&self) -> Vec<usize> {
        self.per_device.iter().map(Vec::len).collect()
    }

    pub fn total_replicas(&self) -> usize {
        self.per_device.iter().map(Vec::len).sum()
    }
}

// ── policies ───────────────────────────────────────────────────────────

/// The four uplink access policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PolicyKind {
    /// Configuration-aware: Bernoulli trial per slot with quality-proportional probability.
    Carp,
    /// Transmit in the `s` strongest slots.
    Sscp { s: usize },
    /// Two uniformly random slots.
    Crdsap,
    /// Random degree from the soliton-like distribution, then uniform slots.
    Irsap,
}

impl PolicyKind {
    /// Whether the policy needs the downlink training phase.
    pub fn requires_training(&self) -> bool {
        matches!(self, PolicyKind::Carp | PolicyKind::Sscp { .. })
    }

    /// Short lowercase name used in configs and CSV output.
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Carp => "carp",
            PolicyKind::Sscp { .. } => "sscp",
            PolicyKind::Crdsap => "crdsap",
            PolicyKind::Irsap => "irsap",
        }
    }

    /// Smallest slot count the policy can run with.
    pub fn min_slots(&self) -> usize {
        match self {
            PolicyKind::Carp => 1,
            PolicyKind::Sscp { s } => *s,
            PolicyKind::Crdsap | PolicyKind::Irsap => 2,
        }
    }

    pub fn validate(&self, slots: usize) -> Result<()> {
        if let PolicyKind::Sscp { s: 0 } = self {
            return Err(Error::invalid("policy.sscp_s", "s-SCP needs s >= 1"));
        }
        if slots < self.min_slots() {
            let (name, reason) = match self {
                PolicyKind::Sscp { s } => ("policy.sscp_s", format!("s = {s} exceeds S = {slots}")),
                _ => ("scenario.s", format!("{self} needs S >= 2, got S = {slots}")),
            };
            return Err(Error::invalid(name, reason));
        }
        Ok(())
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Parses `carp`, `sscp`, `crdsap`, `irsap`; `sscp` takes `s = 2` unless
/// written `sscp:<s>`.
impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let lower = text.trim().to_ascii_lowercase();
        let (head, arg) = match lower.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (lower.as_str(), None),
        };
        let bad = |reason: &str| Error::Parse {
            key: "policy.kind".into(),
            value: text.into(),
            reason: reason.into(),
        };
        match (head, arg) {
            ("carp", None) => Ok(PolicyKind::Carp),
            ("crdsap", None) => Ok(PolicyKind::Crdsap),
            ("irsap", None) => Ok(PolicyKind::Irsap),
            ("sscp", None) => Ok(PolicyKind::Sscp { s: 2 }),
            ("sscp", Some(a)) => a
                .parse()
                .map(|s| PolicyKind::Sscp { s })
                .map_err(|_| bad("s-SCP replica count must be an integer")),
            _ => Err(bad("expected one of carp, sscp, crdsap, irsap")),
        }
    }
}

/// Slot transmission probabilities `p(s) = q(s) / Σ q`.
///
/// An all-zero row carries no information and maps to the uniform vector,
/// as does any row of equal weights.
pub fn carp_probabilities(q_row: &[f64]) -> Vec<f64> {
    let weights: Vec<f64> = q_row.iter().map(|q| q.max(0.0)).collect();
    let total: f64 = weights.iter().sum();
    let equal = weights.windows(2).all(|w| w[0] == w[1]);
    if !equal && total > 0.0 && total.is_finite() {
        weights.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / q_row.len() as f64; q_row.len()]
    }
}

/// Index of the largest entry, ties broken uniformly at random. No random
/// draw is made when the maximum is unique.
fn argmax<R: Rng + ?Sized>(rng: &mut R, values: &[f64]) -> usize {
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let ties: Vec<usize> = (0..values.len()).filter(|&i| values[i] == best).collect();
    match ties.len() {
        0 => 0,
        1 => ties[0],
        n => ties[rng.random_range(0..n)],
    }
}

/// Independent Bernoulli(`p(s)`) per slot. If every trial fails, the
/// device falls back to its best-quality slot.
pub fn carp_select<R: Rng + ?Sized>(rng: &mut R, p: &[f64], q_row: &[f64]) -> Vec<usize> {
    let chosen: Vec<usize> = p
        .iter()
        .enumerate()
        .filter(|(_, &ps)| rng.random::<f64>() < ps)
        .map(|(s, _)| s)
        .collect();
    if chosen.is_empty() {
        vec![argmax(rng, q_row)]
    } else {
        chosen
    }
}

/// The `s` slots with the highest quality, lowest index first on ties.
pub fn sscp_select(q_row: &[f64], s: usize) -> Result<Vec<usize>> {
    if s == 0 || s > q_row.len() {
        return Err(Error::invalid(
            "policy.sscp_s",
            format!("need 1 <= s <= S, got s = {s}, S = {}", q_row.len()),
        ));
    }
    let mut order: Vec<usize> = (0..q_row.len()).collect();
    // Stable sort keeps the lower index first among equal qualities.
    order.sort_by(|&a, &b| q_row[b].total_cmp(&q_row[a]));
    let mut top = order[..s].to_vec();
    top.sort_unstable();
    Ok(top)
}

/// `count` distinct slots out of `slots`, uniform over subsets, by a
/// partial Fisher–Yates shuffle. Returned sorted.
fn uniform_subset<R: Rng + ?Sized>(rng: &mut R, slots: usize, count: usize) -> Vec<usize> {
    debug_assert!(count <= slots);
    let mut pool: Vec<usize> = (0..slots).collect();
    for i in 0..count {
        let j = rng.random_range(i..slots);
        pool.swap(i, j);
    }
    pool.truncate(count);
    pool.sort_unstable();
    pool
}

/// Two distinct slots, uniform over all pairs.
pub fn crdsap_select<R: Rng + ?Sized>(rng: &mut R, slots: usize) -> Result<Vec<usize>> {
    if slots < 2 {
        return Err(Error::invalid("scenario.s", "CRDSAP needs S >= 2"));
    }
    Ok(uniform_subset(rng, slots, 2))
}

/// Replica-degree distribution `P(s) = (1 + 1/(S−1)) / ((s−1)s)` for
/// `s = 2..=S`. Entry `i` holds the mass of degree `i + 2`.
pub fn irsap_degree_pmf(slots: usize) -> Result<Vec<f64>> {
    if slots < 2 {
        return Err(Error::invalid("scenario.s", "IRSAP needs S >= 2"));
    }
    let scale = 1.0 + 1.0 / (slots as f64 - 1.0);
    Ok((2..=slots)
        .map(|s| scale / ((s as f64 - 1.0) * s as f64))
        .collect())
}

/// Mean replica count per device, `(1 + 1/(S−1)) Σ_{s=2}^{S} 1/(s−1)`.
pub fn irsap_mean_degree(slots: usize) -> Result<f64> {
    if slots < 2 {
        return Err(Error::invalid("scenario.s", "IRSAP needs S >= 2"));
    }
    let scale = 1.0 + 1.0 / (slots as f64 - 1.0);
    Ok(scale * (2..=slots).map(|s| 1.0 / (s as f64 - 1.0)).sum::<f64>())
}

/// Draws a degree from `pmf` (as returned by [`irsap_degree_pmf`]) by inverse CDF.
fn sample_degree<R: Rng + ?Sized>(rng: &mut R, pmf: &[f64]) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, p) in pmf.iter().enumerate() {
        acc += p;
        if u < acc {
            return i + 2;
        }
    }
    // u landed in the rounding gap above the accumulated total.
    pmf.len() + 1
}

/// Random degree `s` from the IRSAP distribution, then `s` uniform distinct slots.
pub fn irsap_select<R: Rng + ?Sized>(rng: &mut R, slots: usize) -> Result<Vec<usize>> {
    let pmf = irsap_degree_pmf(slots)?;
    let degree = sample_degree(rng, &pmf);
    Ok(uniform_subset(rng, slots, degree))
}

/// Builds every device's slot set with `policy`.
///
/// `quality` must be present for policies that use training. Training-free
/// policies ignore it (with a warning) and never read it.
pub fn decide_access<R: Rng + ?Sized>(
    policy: PolicyKind,
    quality: Option<&QualityMatrix>,
    rng: &mut R,
    devices: usize,
    slots: usize,
) -> Result<AccessDecision> {
    policy.validate(slots)?;
    let per_device = match policy {
        PolicyKind::Carp | PolicyKind::Sscp { .. } => {
            let q = quality.ok_or_else(|| Error::MissingQuality {
                policy: policy.to_string(),
            })?;
            if q.devices() != devices || q.slots() != slots {
                return Err(Error::Dimension(format!(
                    "quality matrix is {}x{}, scenario is {devices}x{slots}",
                    q.devices(),
                    q.slots()
                )));
            }
            (0..devices)
                .map(|k| match policy {
                    PolicyKind::Sscp { s } => sscp_select(q.row(k), s),
                    _ => Ok(carp_select(rng, &carp_probabilities(q.row(k)), q.row(k))),
                })
                .collect::<Result<Vec<_>>>()?
        }
        PolicyKind::Crdsap | PolicyKind::Irsap => {
            if quality.is_some() {
                log::warn!("{policy} does not use training; ignoring the supplied quality matrix");
            }
            (0..devices)
                .map(|_| match policy {
                    PolicyKind::Crdsap => crdsap_select(rng, slots),
                    _ => irsap_select(rng, slots),
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    AccessDecision::new(slots, per_device)
}
