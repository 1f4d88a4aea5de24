//! `kuramoto2c` command-line front end.
//!
//! Every subcommand builds a [`output::Report`] from one library call and
//! writes it as JSON, CSV or SVG, to standard output or to `--out` together
//! with a run manifest.

mod args;
mod commands;
mod output;
mod svg;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::Cli;

pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_NOT_FOUND: u8 = 3;
pub const EXIT_INCONSISTENT: u8 = 4;
pub const EXIT_USAGE: u8 = 64;
pub const EXIT_IO: u8 = 74;

const THREADS_VAR: &str = "KURAMOTO2C_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] kuramoto2c::Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        use kuramoto2c::Error as E;
        match self {
            CliError::Model(E::Domain(_) | E::StepSize(_)) => EXIT_DOMAIN,
            CliError::Model(E::NotFound(_) | E::Convergence { .. }) => EXIT_NOT_FOUND,
            CliError::Model(E::ClassificationInconsistency { .. }) => EXIT_INCONSISTENT,
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => EXIT_IO,
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    // a pool may already exist when embedded; the cap is then advisory
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = configure_threads().and_then(|()| commands::run(&cli));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kuramoto2c: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
