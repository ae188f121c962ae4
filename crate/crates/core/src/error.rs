use thiserror::Error;

/// Errors raised by the simulator and the analytic routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A scenario or waveform parameter violates its contract.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A function argument lies outside the function's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Vector or matrix shapes do not agree.
    #[error("shape mismatch: {0}")]
    Shape(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn config<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Config(msg.into()))
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn shape<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Shape(msg.into()))
}
