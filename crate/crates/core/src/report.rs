//! CSV result tables and run manifests.
//!
//! Columns are fixed. Integer columns print as integers; real columns print
//! with nine significant digits. A manifest is a config file: the resolved
//! settings plus `manifest.*` metadata lines, which config parsing skips.
//! Feeding a manifest back through `--config` reproduces the CSV exactly.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use crate::access::PolicyKind;
use crate::config::{ScenarioConfig, Settings, MANIFEST_PREFIX};
use crate::engine::{AggregateResult, OptimalS, SweepRow};
use crate::Result;

pub const CSV_HEADER: &str =
    "policy,K,S,N,rho_mtd_w,trials,seed,mean_A,mean_G,ci95_G,mean_P_w,ci95_P_w,ee_rom,ee_mor";

/// Formats `x` with nine significant digits, `%g` style.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if (-5..9).contains(&exp) {
        trim(&format!("{x:.*}", (8 - exp) as usize))
    } else {
        format!("{}e{exp}", trim(mantissa))
    }
}

/// One CSV line (without newline) for an evaluated point.
pub fn csv_row(label: &str, cfg: &ScenarioConfig, r: &AggregateResult) -> String {
    let mut row = format!(
        "{label},{},{},{},{},{},{}",
        cfg.devices,
        cfg.slots,
        cfg.elements(),
        format_sig9(cfg.mtd_tx_power_w),
        r.trials,
        r.seed
    );
    for v in [
        r.mean_successes,
        r.mean_throughput,
        r.ci95_throughput,
        r.mean_power,
        r.ci95_power,
        r.ee_ratio_of_means,
        r.ee_mean_of_ratios,
    ] {
        let _ = write!(row, ",{}", format_sig9(v));
    }
    row
}

/// Header plus one row per point.
pub fn points_csv<'a>(rows: impl IntoIterator<Item = (&'a str, &'a ScenarioConfig, &'a AggregateResult)>) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for (label, cfg, r) in rows {
        out.push_str(&csv_row(label, cfg, r));
        out.push('\n');
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    points_csv(rows.iter().map(|r| (r.policy.name(), &r.config, &r.result)))
}

/// Curve rows for each policy followed by two summary rows, labelled
/// `<policy>@best_G` and `<policy>@best_ee`, repeating the optimal points.
pub fn optimal_csv(results: &[(PolicyKind, ScenarioConfig, OptimalS)]) -> String {
    let mut out = format!("{CSV_HEADER}\n");
    for (policy, base, opt) in results {
        let at = |s: usize| ScenarioConfig { slots: s, ..base.clone() };
        for (s, r) in &opt.curve {
            out.push_str(&csv_row(policy.name(), &at(*s), r));
            out.push('\n');
        }
        for (tag, s) in [("best_G", opt.best_throughput), ("best_ee", opt.best_energy_efficiency)] {
            let r = opt.at(s).expect("optimum is on the curve");
            out.push_str(&csv_row(&format!("{}@{tag}", policy.name()), &at(s), r));
            out.push('\n');
        }
    }
    out
}

/// Everything needed to replay a run.
#[derive(Debug, Clone)]
pub struct Manifest<'a> {
    pub settings: &'a Settings,
    pub command: &'a str,
    pub output: &'a Path,
    /// Training ratio applied per policy.
    pub effective_ratios: Vec<(PolicyKind, f64)>,
}

impl Manifest<'_> {
    pub fn to_text(&self) -> String {
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let ratios: Vec<String> = self
            .effective_ratios
            .iter()
            .map(|(p, r)| format!("{}={}", p.name(), format_sig9(*r)))
            .collect();
        let mut out = String::new();
        let mut meta = |key: &str, value: &str| {
            let _ = writeln!(out, "{MANIFEST_PREFIX}{key} = {value}");
        };
        meta("tool_version", env!("CARGO_PKG_VERSION"));
        meta("timestamp", &timestamp.to_string());
        meta("command", self.command);
        meta("output", &self.output.display().to_string());
        meta("r_effective", &ratios.join(","));
        out.push_str(&self.settings.to_text());
        out
    }
}

/// Manifest path paired with a CSV path: `<csv>.manifest`.
pub fn manifest_path(csv: &Path) -> std::path::PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".manifest");
    name.into()
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
