//! Command-line front end.
//!
//! Five subcommands cover the library's workflows: `schedule` runs the
//! sequential best-response scheduler on demand and fleet files, `baseline`
//! runs the non-game policies, `enumerate` searches for all Nash equilibria,
//! `experiment` runs the named batch studies on synthetic horizons and
//! `calibrate` sizes a demand profile to the nominal-life budget.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence
//! under `--strict`. Errors go to standard error with a machine-parsable
//! `error[kind]:` prefix. Outputs are deterministic: same arguments, files
//! and seed give byte-identical files.
//!
//! The master seed is resolved in precedence order: `--seed`, then the
//! config file's `seed`, then the `EVCS_SEED` environment variable, then 0.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::baselines::{gan_style_schedule, plug_and_charge, shinwari_style_schedule, GanConfig};
use crate::brd::{run_brd, BrdConfig};
use crate::cost::{CostConfig, GameContext, InertiaMode, WindowMode};
use crate::equilibrium::{enumerate_equilibria, DEFAULT_SEARCH_BUDGET};
use crate::error::{Error, Result};
use crate::experiments::{
    convergence_probability_sweep, lifetime_vs_fleet, monetary_cost_comparison,
    optimal_power_search, pareto_frontier, Policy, SimSettings,
};
use crate::io;
use crate::model::{total_load, FleetSpec, LoadProfile, ProfileKind};
use crate::synth::{synthesize_horizon, SynthConfig};
use crate::thermal::{calibrate_exogenous_scale, hotspot_with_inertia, TransformerParams};

#[derive(Parser, Debug)]
#[command(
    name = "evcs",
    version,
    about = "Decentralized EV charging: scheduling, equilibria and batch studies"
)]
struct Cli {
    /// Flat key=value config file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Master seed (falls back to the config file, then EVCS_SEED, then 0).
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Report format for tabular outputs.
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Worker thread cap for parallel studies.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Output directory; created if missing.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,

    /// Exit with code 3 when an iterative scheme fails to converge.
    #[arg(long, global = true)]
    strict: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum WindowArg {
    Own,
    Common,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum InertiaArg {
    Memoryless,
    Inertia,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum BaselineArg {
    Pac,
    Gan,
    Shinwari,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum StudyArg {
    Lifetime,
    Convergence,
    Power,
    Pareto,
    Money,
}

/// Flags shared by the subcommands that read a single-day problem.
#[derive(Args, Debug)]
struct ProblemArgs {
    /// Exogenous demand CSV (`slot,value`, kW).
    #[arg(long)]
    exo: PathBuf,

    /// Fleet CSV (`id,arrival,departure,duration`).
    #[arg(long)]
    fleet: PathBuf,

    /// Ambient temperature CSV; a flat 20 C profile when omitted.
    #[arg(long)]
    ambient: Option<PathBuf>,

    /// Common charging power, kW.
    #[arg(long)]
    power: Option<f64>,

    /// Slot length in hours.
    #[arg(long)]
    dt: Option<f64>,

    /// Aging weight of the objective, in [0, 1].
    #[arg(long)]
    alpha: Option<f64>,

    /// Cost aggregation window.
    #[arg(long, value_enum)]
    window: Option<WindowArg>,

    /// Top-oil thermal response.
    #[arg(long, value_enum)]
    inertia: Option<InertiaArg>,

    /// Oil time constant override, hours.
    #[arg(long)]
    oil_tau: Option<f64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run sequential best response and write the resulting schedule.
    Schedule {
        #[command(flatten)]
        problem: ProblemArgs,

        /// Round budget for the scheduler.
        #[arg(long)]
        max_rounds: Option<usize>,
    },
    /// Run a non-game scheduling policy.
    Baseline {
        #[command(flatten)]
        problem: ProblemArgs,

        /// Which baseline to run.
        #[arg(long, value_enum)]
        policy: BaselineArg,
    },
    /// Enumerate all Nash equilibria and report the decentralization gap.
    Enumerate {
        #[command(flatten)]
        problem: ProblemArgs,

        /// Joint-schedule budget above which the search refuses to run.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Run a named batch study on a synthetic horizon.
    Experiment {
        /// Which study to run.
        #[arg(long, value_enum)]
        study: StudyArg,

        /// Horizon length in days.
        #[arg(long)]
        days: Option<usize>,

        /// Monte-Carlo replicates per sweep point.
        #[arg(long)]
        replicates: Option<usize>,

        /// Fleet sizes, comma-separated.
        #[arg(long)]
        fleet_sizes: Option<String>,

        /// Forecast signal-to-noise ratio in dB; `inf` for exact forecasts.
        #[arg(long)]
        fsnr: Option<f64>,

        /// Charging powers for the power study, comma-separated kW.
        #[arg(long)]
        powers: Option<String>,

        /// Per-EV energy need for the power study, kWh.
        #[arg(long)]
        energy: Option<f64>,

        /// Aging weights for the frontier study, comma-separated.
        #[arg(long)]
        alpha_grid: Option<String>,

        /// Oil time constants for the frontier study, comma-separated hours.
        #[arg(long)]
        oil_taus: Option<String>,

        /// Fleet size for the single-fleet studies.
        #[arg(long)]
        fleet_size: Option<usize>,

        /// Common charging power, kW.
        #[arg(long)]
        power: Option<f64>,
    },
    /// Scale a demand profile so the no-EV year consumes nominal life.
    Calibrate {
        /// Exogenous demand CSV (`slot,value`, kW).
        #[arg(long)]
        exo: PathBuf,

        /// Ambient temperature CSV; a flat 20 C profile when omitted.
        #[arg(long)]
        ambient: Option<PathBuf>,

        /// Slot length in hours.
        #[arg(long)]
        dt: Option<f64>,
    },
}

/// Runs the CLI and returns the process exit code. Kept separate from the
/// binary so tests can drive it in process.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprintln!("error[usage]: {e}");
                    1
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e @ (Error::Data { .. } | Error::Io(_))) => {
            eprintln!("error[data]: {e}");
            2
        }
        Err(e) => {
            eprintln!("error[usage]: {e}");
            1
        }
    }
}

struct Settings {
    config: BTreeMap<String, String>,
    seed: u64,
    format: FormatArg,
    out_dir: PathBuf,
    strict: bool,
}

impl Settings {
    /// CLI flag if given, else config-file key, else the default.
    fn value<V: Copy + FromStr>(&self, flag: Option<V>, key: &str, default: V) -> Result<V> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.config.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::Invalid(format!("config key {key}: cannot parse {raw:?}"))),
            None => Ok(default),
        }
    }

    fn list<V: FromStr>(&self, flag: Option<&str>, key: &str, default: &[V]) -> Result<Vec<V>>
    where
        V: Copy,
    {
        let raw = match flag {
            Some(raw) => raw.to_string(),
            None => match self.config.get(key) {
                Some(raw) => raw.clone(),
                None => return Ok(default.to_vec()),
            },
        };
        raw.split(',')
            .map(|part| {
                part.trim()
                    .parse()
                    .map_err(|_| Error::Invalid(format!("{key}: cannot parse {part:?}")))
            })
            .collect()
    }

    fn out_path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }
}

fn resolve_settings(cli: &Cli) -> Result<Settings> {
    let config = match &cli.config {
        Some(path) => io::read_config(path)?,
        None => BTreeMap::new(),
    };
    let seed = match cli.seed {
        Some(seed) => seed,
        None => match config.get("seed") {
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::Invalid(format!("config key seed: cannot parse {raw:?}")))?,
            None => match std::env::var("EVCS_SEED") {
                Ok(raw) => raw.parse().map_err(|_| {
                    Error::Invalid(format!("EVCS_SEED: cannot parse {raw:?} as an integer"))
                })?,
                Err(_) => 0,
            },
        },
    };
    let format = match cli.format {
        Some(f) => f,
        None => match config.get("format").map(String::as_str) {
            Some("csv") => FormatArg::Csv,
            Some("json") => FormatArg::Json,
            Some(other) => {
                return Err(Error::Invalid(format!(
                    "config key format: expected csv or json, got {other:?}"
                )))
            }
            None => FormatArg::Csv,
        },
    };
    let out_dir = cli
        .out_dir
        .clone()
        .or_else(|| config.get("out_dir").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)?;
    if let Some(jobs) = cli.jobs {
        // The global pool can only be sized once per process; later calls
        // (tests, repeated in-process runs) keep the first configuration.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global();
    }
    Ok(Settings {
        config,
        seed,
        format,
        out_dir,
        strict: cli.strict,
    })
}

struct Problem {
    exo: LoadProfile,
    ambient: LoadProfile,
    fleet: FleetSpec,
    transformer: TransformerParams,
    cost: CostConfig,
}

fn load_problem(args: &ProblemArgs, settings: &Settings) -> Result<Problem> {
    let dt = settings.value(args.dt, "dt", 0.5)?;
    let power = settings.value(args.power, "power", 3.0)?;
    let alpha = settings.value(args.alpha, "alpha", 1.0)?;
    let exo = io::read_load_profile(&args.exo, ProfileKind::PowerKw, dt)?;
    let fleet = io::read_fleet(&args.fleet, power)?;
    let ambient = match &args.ambient {
        Some(path) => io::read_load_profile(path, ProfileKind::TemperatureC, dt)?,
        None => LoadProfile::flat(exo.grid, ProfileKind::TemperatureC, 20.0)?,
    };
    let window_mode = match args.window.or_else(|| match settings
        .config
        .get("window")
        .map(String::as_str)
    {
        Some("own") => Some(WindowArg::Own),
        Some("common") => Some(WindowArg::Common),
        _ => None,
    }) {
        Some(WindowArg::Common) => WindowMode::Common((1..=exo.grid.slots).collect()),
        _ => WindowMode::Own,
    };
    let inertia = match args.inertia.or_else(|| match settings
        .config
        .get("inertia")
        .map(String::as_str)
    {
        Some("memoryless") => Some(InertiaArg::Memoryless),
        Some("inertia") => Some(InertiaArg::Inertia),
        _ => None,
    }) {
        Some(InertiaArg::Memoryless) => InertiaMode::Memoryless,
        _ => InertiaMode::WithInertia,
    };
    let oil_tau = settings.value(args.oil_tau, "oil_tau", 2.5)?;
    let transformer = TransformerParams {
        oil_time_constant_h: oil_tau,
        ..Default::default()
    };
    let cost = CostConfig {
        alpha,
        window_mode,
        inertia,
        ..Default::default()
    };
    Ok(Problem {
        exo,
        ambient,
        fleet,
        transformer,
        cost,
    })
}

#[derive(Serialize)]
struct ScheduleSummary {
    converged: bool,
    rounds_used: usize,
    schedule: Vec<usize>,
    lifetime_years: f64,
    losses_kwh: f64,
}

#[derive(Serialize)]
struct BaselineSummary {
    policy: String,
    converged: bool,
    iterations: usize,
    lifetime_years: f64,
    losses_kwh: f64,
}

#[derive(Serialize)]
struct CalibrationSummary {
    scale: f64,
}

fn day_metrics(
    load: Vec<f64>,
    problem: &Problem,
) -> Result<(f64, f64)> {
    let grid = problem.exo.grid;
    let profile = LoadProfile::new(grid, ProfileKind::PowerKw, load)?;
    let trace = hotspot_with_inertia(&profile, &problem.ambient, &problem.transformer)?;
    let losses: f64 = profile
        .values
        .iter()
        .map(|l| problem.cost.r_total() * l * l * grid.dt_hours)
        .sum();
    Ok((trace.lifetime_years(), losses))
}

fn dispatch(cli: Cli) -> Result<i32> {
    let settings = resolve_settings(&cli)?;
    match &cli.command {
        Command::Schedule {
            problem: args,
            max_rounds,
        } => {
            let problem = load_problem(args, &settings)?;
            let max_rounds = settings.value(*max_rounds, "max_rounds", 100)?;
            let ctx = GameContext::new(
                &problem.exo,
                &problem.ambient,
                &problem.fleet,
                &problem.transformer,
                &problem.cost,
            )?;
            let config = BrdConfig {
                max_rounds,
                seed: settings.seed,
                ..Default::default()
            };
            let result = run_brd(&ctx, &config)?;
            let load = total_load(&problem.exo, &result.schedule.starts, &problem.fleet)?;
            let (lifetime_years, losses_kwh) = day_metrics(load, &problem)?;
            io::write_schedule(&settings.out_path("schedule.csv"), &result.schedule.starts)?;
            io::write_brd_updates(&settings.out_path("brd_updates.csv"), &result)?;
            io::write_json(
                &settings.out_path("summary.json"),
                &ScheduleSummary {
                    converged: result.converged,
                    rounds_used: result.rounds_used,
                    schedule: result.schedule.starts.clone(),
                    lifetime_years,
                    losses_kwh,
                },
            )?;
            println!(
                "schedule: {} after {} rounds",
                if result.converged { "converged" } else { "round budget hit" },
                result.rounds_used
            );
            if settings.strict && !result.converged {
                eprintln!("error[nonconvergence]: no fixed point within {max_rounds} rounds");
                return Ok(3);
            }
            Ok(0)
        }
        Command::Baseline {
            problem: args,
            policy,
        } => {
            let problem = load_problem(args, &settings)?;
            let (label, load, converged, iterations) = match policy {
                BaselineArg::Pac => {
                    let schedule = plug_and_charge(&problem.fleet);
                    io::write_schedule(&settings.out_path("pac_schedule.csv"), &schedule.starts)?;
                    let load = total_load(&problem.exo, &schedule.starts, &problem.fleet)?;
                    ("pac", load, true, 0)
                }
                BaselineArg::Gan => {
                    let config = GanConfig {
                        penalty_weight: GanConfig::default()
                            .penalty_weight
                            .max(2.5 * problem.cost.r_total() * problem.fleet.evs.len() as f64),
                        ..Default::default()
                    };
                    let result = gan_style_schedule(&problem.fleet, &problem.exo, &config)?;
                    io::write_rates(&settings.out_path("gan_rates.csv"), &result.profiles)?;
                    let mut load = problem.exo.values.clone();
                    for (l, a) in load.iter_mut().zip(result.profiles.aggregate()) {
                        *l += a;
                    }
                    ("gan", load, result.converged, result.iterations)
                }
                BaselineArg::Shinwari => {
                    let set = shinwari_style_schedule(&problem.fleet, &problem.exo)?;
                    io::write_rates(&settings.out_path("shinwari_rates.csv"), &set)?;
                    let mut load = problem.exo.values.clone();
                    for (l, a) in load.iter_mut().zip(set.aggregate()) {
                        *l += a;
                    }
                    ("shinwari", load, true, 0)
                }
            };
            let (lifetime_years, losses_kwh) = day_metrics(load, &problem)?;
            io::write_json(
                &settings.out_path("summary.json"),
                &BaselineSummary {
                    policy: label.to_string(),
                    converged,
                    iterations,
                    lifetime_years,
                    losses_kwh,
                },
            )?;
            println!("baseline {label}: lifetime {} years", io::fmt_g9(lifetime_years));
            if settings.strict && !converged {
                eprintln!("error[nonconvergence]: baseline did not reach its tolerance");
                return Ok(3);
            }
            Ok(0)
        }
        Command::Enumerate {
            problem: args,
            budget,
        } => {
            let problem = load_problem(args, &settings)?;
            let budget = settings.value(*budget, "budget", DEFAULT_SEARCH_BUDGET)?;
            let ctx = GameContext::new(
                &problem.exo,
                &problem.ambient,
                &problem.fleet,
                &problem.transformer,
                &problem.cost,
            )?;
            let report = enumerate_equilibria(&ctx, budget)?;
            io::write_json(&settings.out_path("ne_report.json"), &report)?;
            if settings.format == FormatArg::Csv {
                let mut out = String::from("index");
                for i in 1..=problem.fleet.evs.len() {
                    out.push_str(&format!(",start_{i}"));
                }
                out.push('\n');
                for (idx, ne) in report.equilibria.iter().enumerate() {
                    out.push_str(&format!("{}", idx + 1));
                    for s in &ne.starts {
                        out.push_str(&format!(",{s}"));
                    }
                    out.push('\n');
                }
                std::fs::write(settings.out_path("equilibria.csv"), out)?;
            }
            println!(
                "enumerate: {} equilibria, decentralization gap {}",
                report.equilibria.len(),
                io::fmt_g9(report.pod)
            );
            Ok(0)
        }
        Command::Experiment {
            study,
            days,
            replicates,
            fleet_sizes,
            fsnr,
            powers,
            energy,
            alpha_grid,
            oil_taus,
            fleet_size,
            power,
        } => {
            let days = settings.value(*days, "days", 30)?;
            let replicates = settings.value(*replicates, "replicates", 20)?;
            let fsnr = settings.value(*fsnr, "fsnr", f64::INFINITY)?;
            let fleet_size = settings.value(*fleet_size, "fleet_size", 10)?;
            let power = settings.value(*power, "power", 3.0)?;
            let transformer = TransformerParams::default();
            let horizon = synthesize_horizon(
                &SynthConfig {
                    days,
                    seed: settings.seed,
                    ..Default::default()
                },
                &transformer,
            )?;
            let report = match study {
                StudyArg::Lifetime => {
                    let sizes = settings.list(
                        fleet_sizes.as_deref(),
                        "fleet_sizes",
                        &[5usize, 10, 20],
                    )?;
                    let base = SimSettings {
                        power_kw: power,
                        fsnr_db: fsnr,
                        ..SimSettings::new(fleet_size)
                    };
                    lifetime_vs_fleet(
                        &horizon,
                        &[
                            Policy::PlugAndCharge,
                            Policy::Brd,
                            Policy::GanStyle,
                            Policy::ShinwariStyle,
                        ],
                        &sizes,
                        &base,
                        replicates,
                        settings.seed,
                    )?
                }
                StudyArg::Convergence => {
                    let sizes = settings.list(
                        fleet_sizes.as_deref(),
                        "fleet_sizes",
                        &[2usize, 5, 10, 20],
                    )?;
                    convergence_probability_sweep(
                        &horizon,
                        &sizes,
                        replicates,
                        5.0,
                        power,
                        100,
                        settings.seed,
                    )?
                }
                StudyArg::Power => {
                    let grid = settings.list(
                        powers.as_deref(),
                        "powers",
                        &[2.2f64, 3.0, 7.0, 11.0, 22.0, 24.0],
                    )?;
                    let energy = settings.value(*energy, "energy", 12.0)?;
                    let result = optimal_power_search(
                        &horizon,
                        &grid,
                        energy,
                        fleet_size,
                        fsnr,
                        replicates,
                        settings.seed,
                    )?;
                    let mut report = result.report;
                    if let Some(best) = result.best_power_kw {
                        report.push_scalar("best", "brd", "power_kw", best, replicates);
                    }
                    report
                }
                StudyArg::Pareto => {
                    let alphas = settings.list(
                        alpha_grid.as_deref(),
                        "alpha_grid",
                        &[0.0f64, 0.25, 0.5, 0.75, 1.0],
                    )?;
                    let taus =
                        settings.list(oil_taus.as_deref(), "oil_taus", &[0.5f64, 2.5])?;
                    pareto_frontier(&horizon, &alphas, &taus, fleet_size, power, settings.seed)?
                }
                StudyArg::Money => monetary_cost_comparison(
                    &horizon,
                    fleet_size,
                    power,
                    replicates,
                    settings.seed,
                )?,
            };
            match settings.format {
                FormatArg::Csv => io::write_report_csv(&settings.out_path("report.csv"), &report)?,
                FormatArg::Json => io::write_json(&settings.out_path("report.json"), &report)?,
            }
            println!("experiment: {} rows", report.rows.len());
            Ok(0)
        }
        Command::Calibrate { exo, ambient, dt } => {
            let dt = settings.value(*dt, "dt", 0.5)?;
            let exo = io::read_load_profile(exo, ProfileKind::PowerKw, dt)?;
            let ambient = match ambient {
                Some(path) => io::read_load_profile(path, ProfileKind::TemperatureC, dt)?,
                None => LoadProfile::flat(exo.grid, ProfileKind::TemperatureC, 20.0)?,
            };
            let scale = calibrate_exogenous_scale(&exo, &ambient, &TransformerParams::default())?;
            io::write_json(
                &settings.out_path("calibration.json"),
                &CalibrationSummary { scale },
            )?;
            println!("calibrate: scale {}", io::fmt_g9(scale));
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{EvSpec, TimeGrid};
    use std::path::Path;
    use tempfile::tempdir;

    fn write_inputs(dir: &Path) -> (PathBuf, PathBuf) {
        let exo = dir.join("exo.csv");
        let fleet = dir.join("fleet.csv");
        let grid = TimeGrid::new(6, 0.5).unwrap();
        let profile = LoadProfile::new(
            grid,
            ProfileKind::PowerKw,
            vec![3.0, 1.0, 0.5, 0.5, 1.0, 3.0],
        )
        .unwrap();
        io::write_load_profile(&exo, &profile).unwrap();
        let spec = FleetSpec::new(
            vec![
                EvSpec::new(1, 1, 6, 2).unwrap(),
                EvSpec::new(2, 1, 6, 2).unwrap(),
            ],
            1.0,
        )
        .unwrap();
        io::write_fleet(&fleet, &spec).unwrap();
        (exo, fleet)
    }

    fn arg(path: &Path) -> String {
        path.to_str().unwrap().to_string()
    }

    fn run_args(args: &[&str]) -> i32 {
        run(args.iter().copied())
    }

    #[test]
    fn schedule_writes_outputs_and_exits_zero() {
        let dir = tempdir().unwrap();
        let (exo, fleet) = write_inputs(dir.path());
        let out = dir.path().join("out");
        let (exo_s, fleet_s, out_s) = (arg(&exo), arg(&fleet), arg(&out));
        let code = run_args(&[
            "evcs",
            "schedule",
            "--exo",
            &exo_s,
            "--fleet",
            &fleet_s,
            "--power",
            "1",
            "--alpha",
            "0",
            "--seed",
            "7",
            "--out-dir",
            &out_s,
        ]);
        assert_eq!(code, 0);
        assert!(out.join("schedule.csv").exists());
        assert!(out.join("brd_updates.csv").exists());
        assert!(out.join("summary.json").exists());
    }

    #[test]
    fn unknown_flag_is_a_usage_error() {
        let code = run_args(&["evcs", "schedule", "--bogus"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn missing_file_is_a_data_error() {
        let dir = tempdir().unwrap();
        let absent = arg(&dir.path().join("absent.csv"));
        let out = arg(&dir.path().join("out"));
        let code = run_args(&[
            "evcs",
            "calibrate",
            "--exo",
            &absent,
            "--out-dir",
            &out,
        ]);
        assert_eq!(code, 2);
    }

    #[test]
    fn help_exits_zero() {
        assert_eq!(run_args(&["evcs", "--help"]), 0);
    }

    #[test]
    fn config_file_feeds_defaults_and_flags_override() {
        let dir = tempdir().unwrap();
        let (exo, fleet) = write_inputs(dir.path());
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "alpha=0\npower=1\nseed=5\n").unwrap();
        let out = dir.path().join("out");
        let (exo_s, fleet_s, cfg_s, out_s) = (arg(&exo), arg(&fleet), arg(&cfg), arg(&out));
        let code = run_args(&[
            "evcs",
            "schedule",
            "--exo",
            &exo_s,
            "--fleet",
            &fleet_s,
            "--config",
            &cfg_s,
            "--out-dir",
            &out_s,
        ]);
        assert_eq!(code, 0);
    }
}
