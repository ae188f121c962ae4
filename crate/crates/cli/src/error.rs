use std::path::PathBuf;

use thiserror::Error;

/// Failures of the experiment runner, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read config {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{origin}: {message}")]
    Parse { origin: String, message: String },
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error("unknown preset `{0}` (see `ncmv list-presets`)")]
    UnknownPreset(String),
    #[error("simulation failed: {0}")]
    Simulation(ncmv::Error),
    #[error("cannot write results to {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("worker pool: {0}")]
    Pool(String),
}

impl CliError {
    /// Process exit code: 2 for configuration problems, 3 for runtime ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Read { .. }
            | CliError::Parse { .. }
            | CliError::Invalid(_)
            | CliError::UnknownPreset(_) => 2,
            CliError::Simulation(ncmv::Error::Config(_)) => 2,
            CliError::Simulation(_) | CliError::Write { .. } | CliError::Pool(_) => 3,
        }
    }
}

impl From<ncmv::Error> for CliError {
    fn from(e: ncmv::Error) -> Self {
        CliError::Simulation(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(CliError::Invalid(msg.into()))
}
