use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use sealink::analysis::Analyzer;
use sealink::config::{parse_config, Config, REFERENCE_CONFIG};
use sealink::montecarlo::{self, Mode, TrialPlan};
use sealink::output::{emit_csv, ResultRow};
use sealink::presets::{figure_preset, FIGURE_IDS};
use sealink::sweep::{run_sweep, Engine, SweepSpec};
use sealink::validate::{self, Status, ValidateOptions};
use sealink::Error;

const EXIT_CRITERION: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERIC: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "sealink", version, about = "Shore-to-ship link analysis with LEO satellite assistance")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// TOML configuration; missing keys take reference values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. --set 'link.p_u=30 W'. Repeatable.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// Threshold in dB.
    #[arg(long, global = true, allow_negative_numbers = true)]
    tau: Option<f64>,
    /// Shore-to-ship distance in nautical miles.
    #[arg(long = "r-bd", global = true)]
    r_bd: Option<f64>,
    /// Satellites in the constellation
    #[arg(long = "n-sats", global = true)]
    n_sats: Option<u32>,
    /// Frequency channels; must divide the satellite count
    #[arg(long = "n-channels", global = true)]
    n_channels: Option<u32>,
    /// Constellation altitude in km.
    #[arg(long, global = true)]
    altitude: Option<f64>,
    /// Monte Carlo trials (per point for sweeps and figures; a cap for validate).
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Monte Carlo seed
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Fill the elapsed_ms column (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Analytic success probability and capacity at one point.
    Theory,
    /// Monte Carlo estimate at one point.
    Mc {
        #[arg(long, value_enum, default_value_t = ModeArg::Distributional)]
        mode: ModeArg,
    },
    /// Sweep one parameter, as described by [sweep] in the config or by flags.
    Sweep {
        /// tau_db, n_sats, altitude_km, r_bd_nmile or n_channels.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated increasing values.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        /// Comma-separated subset of theory, mc_distributional, mc_positional.
        #[arg(long, value_delimiter = ',')]
        engines: Option<Vec<String>>,
    },
    /// Run the sweep preset for a result figure.
    Figure {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(FIGURE_IDS))]
        id: String,
    },
    /// Run the reference checks; exits 1 if any fails.
    Validate,
    /// Print the reference configuration file.
    DefaultConfig,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ModeArg {
    Positional,
    Distributional,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Positional => Mode::Positional,
            ModeArg::Distributional => Mode::Distributional,
        }
    }
}

/// Flags become overrides on top of the file, so both paths share one validator.
fn load(common: &Common) -> Result<Config, Error> {
    let text = match &common.config {
        Some(p) => std::fs::read_to_string(p).map_err(|source| Error::Io {
            path: p.clone(),
            source,
        })?,
        None => String::new(),
    };
    let mut overrides = Vec::new();
    for s in &common.overrides {
        let (k, v) = s.split_once('=').ok_or_else(|| Error::Config {
            key: s.clone(),
            reason: "expected SECTION.KEY=VALUE".into(),
        })?;
        overrides.push((k.trim().to_string(), v.trim().to_string()));
    }
    let mut flag = |k: &str, v: Option<String>| {
        if let Some(v) = v {
            overrides.push((k.to_string(), v));
        }
    };
    flag("scenario.tau", common.tau.map(|t| format!("\"{t} dB\"")));
    flag("scenario.r_bd", common.r_bd.map(|r| format!("\"{r} nmile\"")));
    flag("constellation.n_sats", common.n_sats.map(|n| n.to_string()));
    flag("constellation.n_channels", common.n_channels.map(|n| n.to_string()));
    flag("constellation.altitude", common.altitude.map(|a| format!("\"{a} km\"")));
    parse_config(&text, &overrides)
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config { .. } | Error::Io { .. } | Error::InvalidArgument(_) => EXIT_CONFIG,
        Error::Numeric(_) | Error::Domain(_) => EXIT_NUMERIC,
    }
}

fn write_rows(common: &Common, rows: &[ResultRow]) -> Result<u8, Error> {
    emit_csv(rows, common.out.as_deref(), common.timing)?;
    Ok(if rows.iter().any(ResultRow::is_error) { EXIT_NUMERIC } else { 0 })
}

fn sweep_rows(specs: &[SweepSpec]) -> Result<Vec<ResultRow>, Error> {
    let mut rows = Vec::new();
    for s in specs {
        rows.extend(run_sweep(s)?);
    }
    Ok(rows)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let common = &cli.common;
    if let Command::DefaultConfig = cli.command {
        print!("{REFERENCE_CONFIG}");
        return Ok(0);
    }
    let cfg = load(common)?;
    let scenario = cfg.scenario;
    match cli.command {
        Command::Theory => {
            let start = Instant::now();
            let mut row = ResultRow::new("point", scenario.tau_db(), Engine::Theory.name());
            row.fill_theory(&Analyzer::new(scenario)?.report()?);
            row.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            write_rows(common, &[row])
        }
        Command::Mc { mode } => {
            let start = Instant::now();
            let mode: Mode = mode.into();
            let trials = common.trials.unwrap_or(SweepSpec::DEFAULT_TRIALS);
            let plan = TrialPlan::new(mode, trials, common.seed.unwrap_or(SweepSpec::DEFAULT_SEED), scenario)?;
            let engine = match mode {
                Mode::Positional => Engine::McPositional,
                Mode::Distributional => Engine::McDistributional,
            };
            let mut row = ResultRow::new("point", scenario.tau_db(), engine.name());
            row.fill_estimate(&montecarlo::run(&plan)?);
            row.elapsed_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            write_rows(common, &[row])
        }
        Command::Sweep { axis, values, engines } => {
            let mut spec = match (cfg.sweep, axis, values) {
                (_, Some(axis), Some(values)) => {
                    let engines = engines
                        .unwrap_or_else(|| vec!["theory".into()])
                        .iter()
                        .map(|e| e.parse())
                        .collect::<Result<Vec<Engine>, Error>>()?;
                    SweepSpec::new(scenario, axis.parse()?, values, engines)?
                }
                (Some(mut spec), None, None) => {
                    if let Some(engines) = engines {
                        spec.engines = engines.iter().map(|e| e.parse()).collect::<Result<_, Error>>()?;
                    }
                    spec
                }
                (None, None, None) => {
                    return Err(Error::Config {
                        key: "sweep".into(),
                        reason: "no [sweep] section; pass --axis and --values".into(),
                    })
                }
                _ => {
                    return Err(Error::InvalidArgument("--axis and --values go together".into()));
                }
            };
            if let Some(t) = common.trials {
                spec.mc_trials = t;
            }
            if let Some(s) = common.seed {
                spec.seed = s;
            }
            spec.validate()?;
            write_rows(common, &sweep_rows(&[spec])?)
        }
        Command::Figure { id } => {
            let mut preset = figure_preset(&id, &scenario)?;
            if let Some(t) = common.trials {
                preset = preset.with_trials(t);
            }
            if let Some(s) = common.seed {
                preset = preset.with_seed(s);
            }
            eprintln!("{}: {}", preset.id, preset.description);
            write_rows(common, &sweep_rows(&preset.sweeps)?)
        }
        Command::Validate => {
            let opts = ValidateOptions {
                base: scenario,
                max_trials: common.trials,
                seed: common.seed.unwrap_or(ValidateOptions::default().seed),
            };
            let results = validate::run_all(&opts);
            for r in &results {
                println!("{r}");
            }
            let status = validate::overall(&results);
            println!("overall: {status}");
            Ok(if status == Status::Fail { EXIT_CRITERION } else { 0 })
        }
        Command::DefaultConfig => unreachable!("handled above"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
