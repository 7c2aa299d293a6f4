//! `nlwitness`: response scans, 2D spectra and the invasiveness witness
//! protocol from a JSON scenario file.
//!
//! Exit codes: 0 success, 2 configuration error, 3 computation error.

mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use config::{load_config, ConfigError, ExperimentKind, ScenarioConfig};
use nlwitness_core::par::Execution;
use nlwitness_core::response::{spectrum_2d, ResponseSample};
use nlwitness_core::scan::delay_scan;
use nlwitness_core::witness::{run_control_experiment, run_main_experiment, run_protocol};

#[derive(Parser)]
#[command(name = "nlwitness", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario file (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads for grid points and control runs (1 = sequential).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Directory for output files.
    #[arg(long, global = true, default_value = ".")]
    output: PathBuf,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Check the scenario and print it with all defaults filled in.
    Validate,
    /// Polarization over the delay grid of the `scan` block.
    Scan,
    /// Run the `experiment` block and write the witness report.
    Witness,
    /// 2D spectrum of a `scan` block with a single t2.
    Spectrum,
}

#[derive(Debug, thiserror::Error)]
enum AppError {
    #[error("config error: {0}")]
    Config(#[from] ConfigError),
    #[error("computation error: {0}")]
    Compute(#[from] nlwitness_core::Error),
    #[error("cannot write {path}: {message}")]
    Write { path: String, message: String },
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Compute(_) | AppError::Write { .. } => 3,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlwitness: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn execution(threads: Option<usize>) -> Result<Execution, AppError> {
    match threads {
        Some(0) => Err(ConfigError::Invalid {
            field: "--threads".into(),
            reason: "must be at least 1".into(),
        }
        .into()),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            // Only fails if a global pool already exists, which is harmless.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => Ok(Execution::Sequential),
        None => Ok(Execution::Parallel),
    }
}

fn write(dir: &Path, name: &str, contents: &str) -> Result<(), AppError> {
    let err = |path: &Path, e: std::io::Error| AppError::Write {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    std::fs::create_dir_all(dir).map_err(|e| err(dir, e))?;
    let path = dir.join(name);
    std::fs::write(&path, contents).map_err(|e| err(&path, e))?;
    println!("wrote {}", path.display());
    Ok(())
}

#[derive(Serialize)]
struct SingleValue {
    kind: &'static str,
    d: f64,
}

fn run(cli: &Cli) -> Result<(), AppError> {
    let path = cli.config.as_deref().ok_or(ConfigError::Missing("--config"))?;
    let exec = execution(cli.threads)?;
    let cfg: ScenarioConfig = load_config(path)?;
    let scenario = cfg.build()?;
    match cli.command {
        Command::Validate => {
            print!("{}", output::to_json(&cfg));
        }
        Command::Scan => {
            let request = scenario.scan.as_ref().ok_or(ConfigError::Missing("scan"))?;
            let rows = delay_scan(request, exec)?;
            write(&cli.output, &cfg.output.scan_csv, &output::scan_csv(&rows))?;
        }
        Command::Spectrum => {
            let request = scenario.scan.as_ref().ok_or(ConfigError::Missing("scan"))?;
            if request.t2.count != 1 {
                return Err(ConfigError::Invalid {
                    field: "scan.t2.count".into(),
                    reason: "a 2D spectrum needs a single waiting time".into(),
                }
                .into());
            }
            let rows = delay_scan(request, exec)?;
            let samples: Vec<ResponseSample> = rows.into_iter().map(Into::into).collect();
            let spectrum = spectrum_2d(&samples)?;
            write(&cli.output, &cfg.output.spectrum_csv, &output::spectrum_csv(&spectrum))?;
        }
        Command::Witness => {
            let protocol = scenario.protocol.as_ref().ok_or(ConfigError::Missing("experiment"))?;
            let json = match scenario.experiment_kind.unwrap_or_default() {
                ExperimentKind::Protocol => output::versioned(&run_protocol(protocol, exec)?),
                ExperimentKind::Main => output::versioned(&SingleValue {
                    kind: "main",
                    d: run_main_experiment(&protocol.experiment)?,
                }),
                ExperimentKind::Control => output::versioned(&SingleValue {
                    kind: "control",
                    d: run_control_experiment(&protocol.experiment)?,
                }),
            };
            write(&cli.output, &cfg.output.witness_json, &json)?;
        }
    }
    Ok(())
}
