use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("non-finite value at {location}")]
    NonFinite { location: String },

    #[error("request (n={n}, k={k}) lies outside the series truncation; needs N >= {need_n}, D >= {need_d}")]
    OutOfTruncation {
        n: usize,
        k: i64,
        need_n: usize,
        need_d: usize,
    },

    #[error("series division: leading coefficient is not invertible")]
    NotInvertible,

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("pole hit at {location}")]
    Pole { location: String },

    #[error("no convergence: {what} (best estimate {estimate:e}, residual {residual:e})")]
    NoConvergence {
        what: String,
        estimate: f64,
        residual: f64,
    },

    #[error("malformed cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's request rather than by a
    /// failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::OutOfTruncation { .. } | Error::DivisionByZero
        )
    }

    /// Short stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DivisionByZero => "division_by_zero",
            Error::InvalidInput(_) => "invalid_input",
            Error::NonFinite { .. } => "non_finite",
            Error::OutOfTruncation { .. } => "out_of_truncation",
            Error::NotInvertible => "not_invertible",
            Error::Invariant(_) => "invariant",
            Error::Pole { .. } => "pole",
            Error::NoConvergence { .. } => "no_convergence",
            Error::Cache { .. } => "cache",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
