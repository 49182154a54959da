use std::path::PathBuf;
use std::process::ExitCode;

use fraclse_mc::McError;
use thiserror::Error;

/// Failures of a CLI command, each tied to a stable exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("input error: {0}")]
    Input(String),

    #[error("simulation failed: {0}")]
    Simulation(String),

    #[error("estimation failed: {0}")]
    Estimation(String),

    #[error("study quality check failed: {0}")]
    Quality(String),

    #[error("cannot write {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 ok, 2 config/input, 3 simulation, 4 estimation, 5 study quality; 1 for output I/O.
    pub fn code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Simulation(_) => 3,
            CliError::Estimation(_) => 4,
            CliError::Quality(_) => 5,
            CliError::Output { .. } => 1,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn output(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Output {
            path: path.into(),
            source,
        }
    }

    /// Classifies an error raised while a study runs (configuration already validated).
    pub fn from_study(e: McError, dir: &std::path::Path) -> Self {
        match e {
            McError::Config(m) | McError::Regime(m) => CliError::Config(m),
            McError::FailureRate { .. } => CliError::Quality(e.to_string()),
            McError::Core(fraclse_core::Error::Optimization(m)) => CliError::Estimation(m),
            McError::Core(c) => CliError::Simulation(c.to_string()),
            McError::Io(io) => CliError::output(dir, io),
            other => CliError::output(dir, std::io::Error::other(other.to_string())),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
