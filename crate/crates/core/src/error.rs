use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the decision pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The data cannot identify the requested model (zero variance, too few points).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// An iterative numerical routine hit its iteration cap.
    #[error("no convergence in {routine} after {iterations} iterations")]
    NonConvergence { routine: &'static str, iterations: usize },

    /// A malformed row or field in an input file.
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: u64, message: String },

    /// A configuration value is invalid.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A configuration value the computation needs was not supplied.
    #[error("incomplete configuration: {0}")]
    MissingConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn degenerate(msg: impl Into<String>) -> Error {
    Error::Degenerate(msg.into())
}
