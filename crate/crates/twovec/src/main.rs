use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use twovec::config::{Format, ScenarioConfig};
use twovec::error::{HarnessError, Result};
use twovec::report::{flatten, sigma_sweep, validate, ValidationReport};
use twovec_core::estimator::{estimate, EstimatorConfig, VectorObservation};
use twovec_core::linalg::Vec3;

#[derive(Parser)]
#[command(name = "twovec", version, about = "Two-vector quaternion attitude estimation and Monte Carlo validation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Override the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Override the number of trials.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Override σ of a tangent or isotropic noise model.
    #[arg(long, global = true)]
    sigma: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the attitude from one pair of observations.
    Estimate {
        /// JSON file with b1, r1, b2, r2 and an optional estimator block.
        #[arg(long)]
        obs: PathBuf,
    },
    /// Run a scenario and write the validation report.
    Montecarlo {
        #[arg(long)]
        config: PathBuf,
        /// Report path; defaults to the config's output path, then stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a scenario; exit status 0 only if every gating check passes.
    ValidateCovariance {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate the scenario over several noise levels and report where the prediction diverges.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        sigmas: Vec<f64>,
    },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ObservationFile {
    b1: Vec3,
    r1: Vec3,
    b2: Vec3,
    r2: Vec3,
    #[serde(default)]
    estimator: EstimatorConfig,
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io { path: path.display().to_string(), source }
}

fn load_config(path: &Path, common: &Common) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(path)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = common.trials {
        cfg.trials = trials;
    }
    if let Some(sigma) = common.sigma {
        cfg.noise = cfg.noise.with_sigma(sigma)?;
    }
    if let Some(format) = common.format {
        cfg.output.format = format;
    }
    Ok(cfg)
}

fn write_report(report: &ValidationReport, cfg: &ScenarioConfig, out: Option<&Path>) -> Result<()> {
    match out.or(cfg.output.path.as_deref()) {
        Some(path) => {
            let file = File::create(path).map_err(io_err(path))?;
            let mut w = BufWriter::new(file);
            report.write(cfg.output.format, &mut w)?;
            w.flush().map_err(io_err(path))
        }
        None => report.write(cfg.output.format, &mut io::stdout().lock()),
    }
}

fn print_value(value: &serde_json::Value, format: Format) -> Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, value)?;
            writeln!(out).map_err(io_err(Path::new("<stdout>")))
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["key", "value"])?;
            for (k, v) in flatten(value) {
                w.write_record([k, v])?;
            }
            w.flush().map_err(io_err(Path::new("<stdout>")))
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    let common = &cli.common;
    match &cli.command {
        Command::Estimate { obs } => {
            let text = std::fs::read_to_string(obs).map_err(io_err(obs))?;
            let file: ObservationFile = serde_json::from_str(&text).map_err(|e| HarnessError::Config(e.to_string()))?;
            let vm1 = VectorObservation::new(file.b1, file.r1)?;
            let vm2 = VectorObservation::new(file.b2, file.r2)?;
            let res = estimate(&vm1, &vm2, &file.estimator)?;
            print_value(&serde_json::to_value(res)?, common.format.unwrap_or_default())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Montecarlo { config, out } => {
            let cfg = load_config(config, common)?;
            let report = validate(&cfg, common.threads)?;
            write_report(&report, &cfg, out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ValidateCovariance { config, out } => {
            let cfg = load_config(config, common)?;
            let report = validate(&cfg, common.threads)?;
            if out.is_some() || cfg.output.path.is_some() {
                write_report(&report, &cfg, out.as_deref())?;
            }
            for c in &report.payload.checks {
                let tag = if c.passed { "pass" } else { "FAIL" };
                let kind = if c.gating { "" } else { " (diagnostic)" };
                eprintln!("{tag} {}{kind}", c.name);
            }
            Ok(if report.payload.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Sweep { config, sigmas } => {
            let cfg = load_config(config, common)?;
            let points = sigma_sweep(&cfg, sigmas, common.threads)?;
            print_value(&serde_json::to_value(points)?, common.format.unwrap_or_default())?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
