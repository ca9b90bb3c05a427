//! Command-line front end: `run`, `sweep`, `optimal-s` and `validate`.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ris_ra::config::{parse_values, ScenarioConfig, Settings};
use ris_ra::engine::{self, run_monte_carlo, simulate_frame, SweepAxis, SweepSpec};
use ris_ra::report::{self, Manifest};
use ris_ra::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "ris-ra", version, about = "Random access in RIS-aided IoT networks: throughput and energy efficiency")]
struct Cli {
    #[command(flatten)]
    common: Common,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Config file (`key = value` lines); a manifest works too.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Override one key, e.g. `--set scenario.k=20`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,

    /// Monte Carlo frames per point.
    #[arg(long, global = true)]
    trials: Option<u64>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// CSV output path; a `.manifest` file is written next to it. Prints to stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Comma-separated policies: carp,sscp,crdsap,irsap (`sscp:<s>` sets s).
    #[arg(long, global = true)]
    policies: Option<String>,

    /// Worker threads (0 = one per core). Does not affect results.
    #[arg(long, default_value_t = 0, global = true)]
    workers: usize,

    /// Progress lines and the SIC trace of each point's first frame on stderr.
    #[arg(long, short, global = true)]
    verbose: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the configured scenario once per policy.
    Run,
    /// Sweep one axis (K, S, N or rho_mtd) for every policy.
    Sweep {
        #[arg(long)]
        axis: Option<String>,
        /// `a..b`, `a..b:step` or `x,y,z`.
        #[arg(long)]
        values: Option<String>,
    },
    /// Grid-search the slot count S for the best throughput and EE.
    #[command(name = "optimal-s")]
    OptimalS {
        /// `a..b`, `a..b:step` or `x,y,z`.
        #[arg(long = "s-values")]
        s_values: Option<String>,
    },
    /// Check a config and print it with every default filled in.
    Validate,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(if cli.common.verbose { log::LevelFilter::Debug } else { log::LevelFilter::Warn })
        .format_target(false)
        .init();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn load_settings(cli: &Cli) -> Result<Settings> {
    let c = &cli.common;
    let mut settings = match &c.config {
        Some(path) => Settings::from_file(path)?,
        None => Settings::default(),
    };
    for o in &c.overrides {
        settings.apply_override(o)?;
    }
    if let Some(t) = c.trials {
        settings.set("sim.trials", &t.to_string())?;
    }
    if let Some(s) = c.seed {
        settings.set("sim.seed", &s.to_string())?;
    }
    if let Some(p) = &c.policies {
        settings.set("run.policies", p)?;
    }
    match &cli.command {
        Command::Sweep { axis, values } => {
            if let Some(a) = axis {
                settings.set("sweep.axis", a)?;
            }
            if let Some(v) = values {
                settings.set("sweep.values", v)?;
            }
        }
        Command::OptimalS { s_values: Some(v) } => settings.set("optimal.s_values", v)?,
        _ => {}
    }
    Ok(settings)
}

fn values_of(settings: &Settings, key: &'static str) -> Result<Vec<f64>> {
    let raw = settings.get(key).unwrap_or_default();
    parse_values(raw).ok_or_else(|| Error::Parse {
        key: key.into(),
        value: raw.into(),
        reason: "expected a..b, a..b:step or a comma-separated list".into(),
    })
}

fn execute(cli: &Cli) -> Result<()> {
    let settings = load_settings(cli)?;
    let base = settings.resolve()?;
    let policies = settings.policies()?;
    let verbose = cli.common.verbose;

    let (command, csv) = match &cli.command {
        Command::Validate => {
            for &p in &policies {
                ScenarioConfig { policy: p, ..base.clone() }.validate()?;
            }
            print!("{}", settings.to_text());
            eprintln!("config ok");
            return Ok(());
        }
        Command::Run => {
            let points: Vec<ScenarioConfig> = policies
                .iter()
                .map(|&p| {
                    let cfg = ScenarioConfig { policy: p, ..base.clone() };
                    cfg.validate().map(|_| cfg)
                })
                .collect::<Result<_>>()?;
            let results = engine::with_workers(cli.common.workers, || {
                points
                    .iter()
                    .enumerate()
                    .map(|(i, cfg)| {
                        progress(verbose, i, points.len(), cfg);
                        trace_first_frame(verbose, cfg)?;
                        run_monte_carlo(cfg)
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            let csv = report::points_csv(points.iter().zip(&results).map(|(c, r)| (c.policy.name(), c, r)));
            ("run", csv)
        }
        Command::Sweep { .. } => {
            let axis: SweepAxis = settings.get("sweep.axis").unwrap_or("K").parse()?;
            let spec = SweepSpec {
                axis,
                values: values_of(&settings, "sweep.values")?,
                base: base.clone(),
                policies: policies.clone(),
            };
            let points = spec.points()?;
            let rows = engine::with_workers(cli.common.workers, || {
                points
                    .iter()
                    .enumerate()
                    .map(|(i, (policy, value, cfg))| {
                        progress(verbose, i, points.len(), cfg);
                        trace_first_frame(verbose, cfg)?;
                        Ok(engine::SweepRow {
                            policy: *policy,
                            axis_value: *value,
                            config: cfg.clone(),
                            result: run_monte_carlo(cfg)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            ("sweep", report::sweep_csv(&rows))
        }
        Command::OptimalS { .. } => {
            let s_values = values_of(&settings, "optimal.s_values")?
                .into_iter()
                .map(|v| {
                    if v >= 1.0 && v.fract() == 0.0 {
                        Ok(v as usize)
                    } else {
                        Err(Error::invalid("optimal.s_values", format!("{v} is not a positive integer")))
                    }
                })
                .collect::<Result<Vec<usize>>>()?;
            let results = engine::with_workers(cli.common.workers, || {
                policies
                    .iter()
                    .enumerate()
                    .map(|(i, &policy)| {
                        let cfg = ScenarioConfig { policy, ..base.clone() };
                        let usable: Vec<usize> = s_values.iter().copied().filter(|&s| s >= policy.min_slots()).collect();
                        if usable.len() < s_values.len() {
                            log::warn!("{policy}: skipping S < {}", policy.min_slots());
                        }
                        progress(verbose, i, policies.len(), &cfg);
                        let opt = engine::optimal_over_s(&cfg, &usable)?;
                        Ok((policy, cfg, opt))
                    })
                    .collect::<Result<Vec<_>>>()
            })?;
            ("optimal-s", report::optimal_csv(&results))
        }
    };

    match &cli.common.out {
        None => print!("{csv}"),
        Some(path) => {
            let manifest = Manifest {
                settings: &settings,
                command,
                output: path,
                effective_ratios: policies
                    .iter()
                    .map(|&p| (p, ScenarioConfig { policy: p, ..base.clone() }.effective_training_ratio()))
                    .collect(),
            };
            report::write_atomic(path, &csv)?;
            report::write_atomic(&report::manifest_path(path), &manifest.to_text())?;
            announce(path);
        }
    }
    Ok(())
}

fn progress(verbose: bool, i: usize, total: usize, cfg: &ScenarioConfig) {
    if verbose {
        eprintln!(
            "[{}/{total}] {} K={} S={} N={} rho={}",
            i + 1,
            cfg.policy,
            cfg.devices,
            cfg.slots,
            cfg.elements(),
            cfg.mtd_tx_power_w
        );
    }
}

fn trace_first_frame(verbose: bool, cfg: &ScenarioConfig) -> Result<()> {
    if verbose {
        let frame = simulate_frame(cfg, 0)?;
        eprintln!("# sic trace, trial 0: iter,slot,device");
        eprint!("{}", frame.decode.trace_lines());
    }
    Ok(())
}

fn announce(path: &Path) {
    eprintln!("wrote {} and {}", path.display(), report::manifest_path(path).display());
}
