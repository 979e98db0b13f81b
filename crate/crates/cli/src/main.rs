//! `horocycle` command-line driver.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O failure while writing output |
//! | 2 | invalid flags or config |
//! | 3 | trajectory reached the boundary (partial CSV written) |
//! | 4 | verification failed (report written) |
//! | 5 | no periodic return within the time budget |

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;
use horocycle_core::Config;
use thiserror::Error;

use args::{Cli, Command};

/// Overrides the worker count from the config file.
const WORKERS_ENV: &str = "HOROCYCLE_WORKERS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    BoundaryEscape(String),
    #[error("{0}")]
    VerificationFailed(String),
    #[error("{0}")]
    NoReturn(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::BoundaryEscape(_) => 3,
            CliError::VerificationFailed(_) => 4,
            CliError::NoReturn(_) => 5,
        }
    }
}

fn load_config(cli: &Cli) -> Result<Config, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => Config::load(path).map_err(|e| CliError::Usage(e.to_string()))?,
        None => Config::default(),
    };
    if let Ok(raw) = std::env::var(WORKERS_ENV) {
        match raw.trim().parse::<usize>() {
            Ok(n) if n > 0 => cfg.workers = Some(n),
            _ => return Err(CliError::Usage(format!("{WORKERS_ENV} must be a positive integer, got `{raw}`"))),
        }
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), CliError> {
    let cfg = load_config(&cli)?;
    if let Some(n) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {n} workers: {e}")))?;
    }
    match &cli.command {
        Command::Simulate(a) => commands::simulate(a, &cfg),
        Command::Verify(a) => commands::verify(a, &cfg),
        Command::Period(a) => commands::period(a, &cfg),
        Command::Mane(a) => commands::mane(a, &cfg),
        Command::Foliation(a) => commands::foliation(a, &cfg),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("horocycle: {e}");
            ExitCode::from(e.code())
        }
    }
}
