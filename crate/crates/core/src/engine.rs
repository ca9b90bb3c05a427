//! Frame simulation and Monte Carlo experiments.
//!
//! A frame runs the full pipeline: place devices, compute the SNR grid over
//! the `S` surface configurations, measure qualities when the policy trains,
//! pick access slots, peel with SIC, and charge power for the replicas
//! actually sent. Placements are redrawn every frame.
//!
//! Trial `t` of a run draws only from the substreams of `(seed, t)`, and
//! aggregation runs in trial order, so results do not depend on the number
//! of worker threads.

use rayon::prelude::*;

use crate::access::{decide_access, measure_quality, AccessDecision, PolicyKind};
use crate::channel::{sample_mtd_placements, snr_matrix, NodePlacement, PhaseShiftSet, RadioParams, RisGeometry, SnrMatrix};
use crate::power::{frame_metrics, FrameMetrics, FrameTiming, PowerParams};
use crate::receiver::{build_occupancy, sic_decode, DecodeResult};
use crate::rng::{substream, SimRng, Stage};
use crate::{Error, Result};

pub use crate::config::ScenarioConfig;

/// 97.5% standard normal quantile.
const Z_95: f64 = 1.959963984540054;

// ── single frame ───────────────────────────────────────────────────────

/// Random streams used by one frame.
pub struct FrameStreams {
    pub placement: SimRng,
    pub estimation: SimRng,
    pub access: SimRng,
}

impl FrameStreams {
    pub fn for_trial(seed: u64, trial: u64) -> Self {
        Self {
            placement: substream(seed, trial, Stage::Placement),
            estimation: substream(seed, trial, Stage::Estimation),
            access: substream(seed, trial, Stage::Access),
        }
    }
}

/// Outcome of one frame.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub placements: Vec<NodePlacement>,
    pub snr: SnrMatrix,
    pub decision: AccessDecision,
    pub decode: DecodeResult,
    pub metrics: FrameMetrics,
}

impl TrialResult {
    /// Successful access attempts `A`.
    pub fn successes(&self) -> usize {
        self.metrics.successes
    }

    pub fn replica_counts(&self) -> Vec<usize> {
        self.decision.replica_counts()
    }
}

/// A scenario with its derived model objects built once.
#[derive(Debug, Clone)]
pub struct PreparedScenario {
    cfg: ScenarioConfig,
    geometry: RisGeometry,
    ap: NodePlacement,
    radio: RadioParams,
    phases: PhaseShiftSet,
    power: PowerParams,
    timing: FrameTiming,
}

impl PreparedScenario {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg: cfg.clone(),
            geometry: cfg.geometry()?,
            ap: cfg.ap()?,
            radio: cfg.radio()?,
            phases: cfg.phases()?,
            power: cfg.power()?,
            timing: cfg.timing()?,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    /// Runs one frame with device placements drawn from `streams`.
    pub fn simulate_frame(&self, streams: &mut FrameStreams) -> Result<TrialResult> {
        let placements = sample_mtd_placements(
            &mut streams.placement,
            self.cfg.devices,
            self.cfg.mtd_distance_m,
            self.cfg.mtd_angle_rad,
            self.cfg.mtd_gain,
        )?;
        self.simulate_with_placements(placements, streams)
    }

    /// Runs one frame for fixed device placements.
    pub fn simulate_with_placements(
        &self,
        placements: Vec<NodePlacement>,
        streams: &mut FrameStreams,
    ) -> Result<TrialResult> {
        let cfg = &self.cfg;
        let devices = placements.len();
        let snr = snr_matrix(&self.geometry, &self.ap, &placements, &self.phases, &self.radio);
        let training = cfg.policy.requires_training();
        let quality = if training {
            Some(measure_quality(
                &snr,
                &vec![cfg.estimation_c; devices],
                &vec![cfg.estimation_noise_std; devices],
                &mut streams.estimation,
            )?)
        } else {
            None
        };
        let decision = decide_access(cfg.policy, quality.as_ref(), &mut streams.access, devices, cfg.slots)?;
        let decode = sic_decode(&build_occupancy(&decision), &snr, self.radio.snr_threshold())?;
        let metrics = frame_metrics(
            &self.power,
            &self.timing,
            self.geometry.elements(),
            &decision.replica_counts(),
            decode.decoded.len(),
            training,
            training || cfg.always_charge_training,
        )?;
        Ok(TrialResult {
            placements,
            snr,
            decision,
            decode,
            metrics,
        })
    }
}

/// Runs trial `trial` of `cfg`.
pub fn simulate_frame(cfg: &ScenarioConfig, trial: u64) -> Result<TrialResult> {
    PreparedScenario::new(cfg)?.simulate_frame(&mut FrameStreams::for_trial(cfg.seed, trial))
}

// ── aggregation ────────────────────────────────────────────────────────

/// Monte Carlo estimates over a run's trials.
#[derive(Debug, Clone, PartialEq)]
pub struct AggregateResult {
    pub trials: u64,
    pub seed: u64,
    pub mean_successes: f64,
    /// Mean throughput, packet/s.
    pub mean_throughput: f64,
    /// Half-width of the normal-approximation 95% interval.
    pub ci95_throughput: f64,
    /// Mean total power, W.
    pub mean_power: f64,
    pub ci95_power: f64,
    /// `mean_throughput / mean_power`.
    pub ee_ratio_of_means: f64,
    /// Mean of per-frame `G / P`.
    pub ee_mean_of_ratios: f64,
    /// Delta-method 95% half-width for `ee_ratio_of_means`.
    pub ci95_ee: f64,
    pub mean_total_replicas: f64,
    pub min_total_replicas: usize,
    pub max_total_replicas: usize,
}

impl AggregateResult {
    /// Reduces per-frame metrics in the given order.
    pub fn from_frames(seed: u64, frames: &[FrameSummary]) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::invalid("sim.trials", "need at least one trial"));
        }
        let n = frames.len() as f64;
        let mean = |f: &dyn Fn(&FrameSummary) -> f64| frames.iter().map(f).sum::<f64>() / n;
        let mean_g = mean(&|t| t.throughput);
        let mean_p = mean(&|t| t.power);
        let half_width = |f: &dyn Fn(&FrameSummary) -> f64, m: f64| {
            if frames.len() < 2 {
                return 0.0;
            }
            let var = frames.iter().map(|t| (f(t) - m).powi(2)).sum::<f64>() / (n - 1.0);
            Z_95 * (var / n).sqrt()
        };
        let ee = mean_g / mean_p;
        Ok(Self {
            trials: frames.len() as u64,
            seed,
            mean_successes: mean(&|t| t.successes as f64),
            mean_throughput: mean_g,
            ci95_throughput: half_width(&|t| t.throughput, mean_g),
            mean_power: mean_p,
            ci95_power: half_width(&|t| t.power, mean_p),
            ee_ratio_of_means: ee,
            ee_mean_of_ratios: mean(&|t| t.throughput / t.power),
            ci95_ee: half_width(&|t| (t.throughput - ee * t.power) / mean_p, 0.0),
            mean_total_replicas: mean(&|t| t.total_replicas as f64),
            min_total_replicas: frames.iter().map(|t| t.total_replicas).min().unwrap_or(0),
            max_total_replicas: frames.iter().map(|t| t.total_replicas).max().unwrap_or(0),
        })
    }
}

/// The per-frame numbers aggregation needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameSummary {
    pub successes: usize,
    pub throughput: f64,
    pub power: f64,
    pub total_replicas: usize,
}

impl From<&TrialResult> for FrameSummary {
    fn from(t: &TrialResult) -> Self {
        Self {
            successes: t.metrics.successes,
            throughput: t.metrics.throughput,
            power: t.metrics.power.total(),
            total_replicas: t.decision.total_replicas(),
        }
    }
}

/// Per-frame summaries of every trial, in trial order.
pub fn run_frames(cfg: &ScenarioConfig) -> Result<Vec<FrameSummary>> {
    let prepared = PreparedScenario::new(cfg)?;
    (0..cfg.trials)
        .into_par_iter()
        .map(|t| {
            prepared
                .simulate_frame(&mut FrameStreams::for_trial(cfg.seed, t))
                .map(|r| FrameSummary::from(&r))
        })
        .collect()
}

/// Runs `cfg.trials` frames on the global thread pool.
pub fn run_monte_carlo(cfg: &ScenarioConfig) -> Result<AggregateResult> {
    AggregateResult::from_frames(cfg.seed, &run_frames(cfg)?)
}

/// Runs on a dedicated pool of `workers` threads (`0` = rayon's default).
pub fn run_monte_carlo_with_workers(cfg: &ScenarioConfig, workers: usize) -> Result<AggregateResult> {
    with_workers(workers, || run_monte_carlo(cfg))
}

/// Runs `job` inside a thread pool of `workers` threads (`0` = default).
pub fn with_workers<T: Send>(workers: usize, job: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::invalid("workers", e.to_string()))?;
    pool.install(job)
}

// ── sweeps ─────────────────────────────────────────────────────────────

/// Parameter a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepAxis {
    /// Contending devices K.
    Devices,
    /// Device transmit power ρ_MTD in watts.
    MtdTxPower,
    /// Surface elements N, kept square.
    Elements,
    /// Slots S.
    Slots,
}

impl SweepAxis {
    pub fn name(&self) -> &'static str {
        match self {
            SweepAxis::Devices => "K",
            SweepAxis::MtdTxPower => "rho_mtd",
            SweepAxis::Elements => "N",
            SweepAxis::Slots => "S",
        }
    }

    /// Substitutes `value` into `cfg`.
    pub fn apply(&self, cfg: &mut ScenarioConfig, value: f64) -> Result<()> {
        let count = |name: &'static str| -> Result<usize> {
            if value >= 1.0 && value.fract() == 0.0 && value < u32::MAX as f64 {
                Ok(value as usize)
            } else {
                Err(Error::invalid(name, format!("{value} is not a positive integer")))
            }
        };
        match self {
            SweepAxis::Devices => cfg.devices = count("sweep K")?,
            SweepAxis::Slots => cfg.slots = count("sweep S")?,
            SweepAxis::MtdTxPower => cfg.mtd_tx_power_w = value,
            SweepAxis::Elements => {
                let n = count("sweep N")?;
                let side = (n as f64).sqrt().round() as usize;
                if side * side != n {
                    return Err(Error::invalid(
                        "sweep N",
                        format!("{n} is not a perfect square; the surface keeps n_x = n_z"),
                    ));
                }
                cfg.ris_n_x = side;
                cfg.ris_n_z = side;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "K" | "k" => Ok(SweepAxis::Devices),
            "S" | "s" => Ok(SweepAxis::Slots),
            "N" | "n" => Ok(SweepAxis::Elements),
            "rho_mtd" | "rho" => Ok(SweepAxis::MtdTxPower),
            other => Err(Error::Parse {
                key: "sweep.axis".into(),
                value: other.into(),
                reason: "expected K, S, N or rho_mtd".into(),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    /// Ascending axis values.
    pub values: Vec<f64>,
    pub base: ScenarioConfig,
    pub policies: Vec<PolicyKind>,
}

/// One evaluated sweep point.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub policy: PolicyKind,
    pub axis_value: f64,
    pub config: ScenarioConfig,
    pub result: AggregateResult,
}

impl SweepSpec {
    /// The scenario for every point, ordered by policy then axis value.
    pub fn points(&self) -> Result<Vec<(PolicyKind, f64, ScenarioConfig)>> {
        if self.values.is_empty() {
            return Err(Error::invalid("sweep.values", "need at least one value"));
        }
        if self.values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sweep.values", "values must be strictly increasing"));
        }
        let mut policies = self.policies.clone();
        policies.sort();
        policies.dedup();
        if policies.is_empty() {
            return Err(Error::invalid("run.policies", "need at least one policy"));
        }
        let mut points = Vec::with_capacity(policies.len() * self.values.len());
        for &policy in &policies {
            for &value in &self.values {
                let mut cfg = self.base.clone();
                cfg.policy = policy;
                self.axis.apply(&mut cfg, value)?;
                cfg.validate()?;
                points.push((policy, value, cfg));
            }
        }
        Ok(points)
    }
}

/// Evaluates every (policy, axis value) point. Every point shares the
/// base seed, so neighbouring points see common random numbers.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<SweepRow>> {
    spec.points()?
        .into_iter()
        .map(|(policy, axis_value, config)| {
            let result = run_monte_carlo(&config)?;
            Ok(SweepRow {
                policy,
                axis_value,
                config,
                result,
            })
        })
        .collect()
}

// ── optimal S ──────────────────────────────────────────────────────────

#[derive(Debug, Clone)]
pub struct OptimalS {
    /// `(S, aggregate)` for every evaluated S, ascending.
    pub curve: Vec<(usize, AggregateResult)>,
    /// S maximising mean throughput.
    pub best_throughput: usize,
    /// S maximising ratio-of-means energy efficiency.
    pub best_energy_efficiency: usize,
}

impl OptimalS {
    pub fn at(&self, slots: usize) -> Option<&AggregateResult> {
        self.curve.iter().find(|(s, _)| *s == slots).map(|(_, r)| r)
    }
}

/// Grid search over `slot_values`. Ties go to the smaller S.
pub fn optimal_over_s(cfg: &ScenarioConfig, slot_values: &[usize]) -> Result<OptimalS> {
    let mut values = slot_values.to_vec();
    values.sort_unstable();
    values.dedup();
    if values.is_empty() {
        return Err(Error::invalid("optimal.s_values", "need at least one S"));
    }
    let curve = values
        .iter()
        .map(|&s| {
            let mut point = cfg.clone();
            point.slots = s;
            run_monte_carlo(&point).map(|r| (s, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let best = |metric: fn(&AggregateResult) -> f64| {
        curve
            .iter()
            .fold(None::<(usize, f64)>, |best, (s, r)| match best {
                Some((_, m)) if metric(r) <= m => best,
                _ => Some((*s, metric(r))),
            })
            .map(|(s, _)| s)
            .expect("curve is nonempty")
    };
    Ok(OptimalS {
        best_throughput: best(|r| r.mean_throughput),
        best_energy_efficiency: best(|r| r.ee_ratio_of_means),
        curve,
    })
}
