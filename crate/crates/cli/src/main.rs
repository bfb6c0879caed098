mod args;
mod commands;
mod io;
mod output;

use std::process::ExitCode;

use clap::Parser;
use tailfit_bench::StudyError;
use tailfit_core::TailError;

use crate::args::Cli;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad or inconsistent arguments; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Unreadable or malformed input data.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Tail(#[from] TailError),
    #[error(transparent)]
    Study(StudyError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
}

impl From<StudyError> for CliError {
    fn from(e: StudyError) -> Self {
        match e {
            StudyError::Config(m) | StudyError::InvalidSpec(m) => CliError::Usage(m),
            StudyError::Core(t) => CliError::Tail(t),
            other => CliError::Study(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = cli.threads.unwrap_or(0);
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
        eprintln!("tailfit: cannot start thread pool: {e}");
        return ExitCode::from(1);
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tailfit: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("\nFor more information, try '--help'.");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
