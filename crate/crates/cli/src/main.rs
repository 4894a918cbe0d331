//! `hqr`: batch driver for the quasirandomness measures, constructions and
//! identity suites.

mod args;
mod commands;
mod lemmas;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Errors that stop a run before a report exists.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameters (exit 2).
    Usage(String),
    Core(hqr_core::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(msg) => f.write_str(msg),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<hqr_core::Error> for CliError {
    fn from(e: hqr_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(e.into())
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

fn main() -> ExitCode {
    let cli = Cli::try_parse().unwrap_or_else(|e| e.exit());
    if let Some(workers) = cli.workers {
        if workers == 0 {
            eprintln!("error: worker count must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let result = match &cli.command {
        Command::Sample(a) => commands::sample(a),
        Command::Measure(a) => commands::measure(a),
        Command::Separate(a) => commands::separate(a),
        Command::Poset(a) => commands::poset(a),
        Command::Verify(a) => commands::verify(a),
        Command::Census(a) => commands::census(a),
    };
    match result.and_then(|report| output::emit(&report, &cli.output)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
