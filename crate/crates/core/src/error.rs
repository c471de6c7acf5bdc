use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("packet length K={k} exceeds the expansion limit {k_max}; use the quadrature path")]
    Capability { k: usize, k_max: usize },

    #[error("expansion cancellation: result {value} left [0, 1] by more than the guard")]
    Cancellation { value: f64 },

    #[error(
        "quadrature did not converge: estimate {value}, error {error} after {intervals} intervals"
    )]
    Quadrature {
        value: f64,
        error: f64,
        intervals: usize,
    },

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("target {target} is not bracketed by curve {curve}")]
    Range { target: f64, curve: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// Process exit status for the command-line front end: 3 for I/O
    /// failures, 1 for everything else (bad input or configuration).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } => 3,
            Error::Csv(e) if e.is_io_error() => 3,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
