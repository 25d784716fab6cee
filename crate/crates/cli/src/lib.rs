//! Config-driven front end: `pcoct <command> --config FILE [--out DIR] [--seed N] [--trials N]`.
//!
//! Data goes to files in the output directory. Diagnostics go to stderr, and a
//! failure prints one JSON record there before exiting with code 2 (config) or
//! 3 (numeric).

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::config::{Config, Overrides};
use crate::error::{CliError, EXIT_CONFIG};

#[derive(Debug, Parser)]
#[command(name = "pcoct", version, about = "Phase-conjugate OCT simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML experiment config.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory, overriding `output.dir`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Master seed, overriding `montecarlo.seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Trial count, overriding `montecarlo.trials`.
    #[arg(long, global = true)]
    pub trials: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Mean interference signature over a delay sweep.
    Signature,
    /// e^-2 axial resolution per modality.
    Resolution,
    /// Dispersion cancellation table.
    Dispersion,
    /// Closed-form SNR and noise budget.
    Snr,
    /// Monte Carlo SNR or mean-trace experiment.
    Montecarlo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Signature => "signature",
            Command::Resolution => "resolution",
            Command::Dispersion => "dispersion",
            Command::Snr => "snr",
            Command::Montecarlo => "montecarlo",
        }
    }
}

/// Loads, resolves and runs; returns the files written.
pub fn execute(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    let config = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::io(&format!("config {}", path.display()), e, error::ErrorClass::Config))?;
            Config::parse(&text)?
        }
        None => Config::default(),
    };
    let overrides = Overrides {
        out: cli.out.clone(),
        seed: cli.seed,
        trials: cli.trials,
    };
    let plan = config.resolve(&overrides)?;
    output::prepare_dir(&plan.out_dir)?;
    match cli.command {
        Command::Signature => commands::signature(&plan),
        Command::Resolution => commands::resolution(&plan),
        Command::Dispersion => commands::dispersion(&plan),
        Command::Snr => commands::snr(&plan),
        Command::Montecarlo => commands::montecarlo(&plan),
    }
}

/// Full process behaviour minus the exit itself; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if !e.use_stderr() {
                // --help and --version
                print!("{e}");
                return 0;
            }
            let err = CliError::config("usage", e.to_string().trim().to_string());
            eprintln!("{}", err.record());
            return EXIT_CONFIG;
        }
    };
    match execute(&cli) {
        Ok(files) => {
            for f in files {
                eprintln!("wrote {}", f.display());
            }
            0
        }
        Err(err) => {
            eprintln!("{}", err.record());
            err.exit_code()
        }
    }
}
