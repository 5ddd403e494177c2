mod args;
mod commands;
mod schema;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

/// Environment variable capping the worker threads.
const THREADS_VAR: &str = "WASSER_INFER_THREADS";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or configuration.
    Usage(String),
    /// Unreadable or malformed input.
    Input(String),
    Lib(wasser_infer::Error),
    Internal(String),
}

impl From<wasser_infer::Error> for CliError {
    fn from(e: wasser_infer::Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    /// 2 for usage, input and domain errors; 3 for numerical failures.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 3,
            CliError::Internal(_) => 3,
            _ => 2,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
            CliError::Lib(e) => write!(f, "{e}"),
        }
    }
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    let output = match &cli.command {
        Command::Dist(a) => commands::dist(a)?,
        Command::Ci(a) => commands::ci(a)?,
        Command::Test(a) => commands::test(a)?,
        Command::Simulate(a) => commands::simulate(a)?,
        Command::Audit(a) => commands::audit_cmd(a)?,
        Command::RepairSweep(a) => commands::repair_sweep_cmd(a)?,
    };
    match &output.path {
        Some(path) => {
            std::fs::write(path, &output.bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(&output.bytes)
                .and_then(|()| stdout.flush())
                .map_err(|e| CliError::Input(format!("stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
