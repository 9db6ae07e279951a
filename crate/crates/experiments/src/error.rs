use thiserror::Error;

/// Failure of a subcommand, split by the exit code it maps to.
#[derive(Debug, Error)]
pub enum RunError {
    /// Unreadable, malformed or out-of-range configuration, or an output
    /// location that cannot be written.
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
        }
    }
}

impl From<onef::Error> for RunError {
    fn from(e: onef::Error) -> Self {
        match e {
            onef::Error::Numerical(_) | onef::Error::Io(_) => RunError::Numerical(e.to_string()),
            _ => RunError::Config(e.to_string()),
        }
    }
}

impl From<csv::Error> for RunError {
    fn from(e: csv::Error) -> Self {
        RunError::Config(format!("writing CSV: {e}"))
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Config(format!("I/O: {e}"))
    }
}

pub type RunResult<T> = Result<T, RunError>;
