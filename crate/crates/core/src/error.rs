use thiserror::Error;

/// Errors raised by model construction, propagation and optimization.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid noise model: {0}")]
    InvalidNoise(String),
    #[error("invalid pulse sequence: {0}")]
    InvalidPulse(String),
    #[error("invalid operator: {0}")]
    InvalidOperator(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("serialization: {0}")]
    Serde(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
