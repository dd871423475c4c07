use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by the model, design and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A physical or cycle-validity constraint is violated.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// Heat capacity and specific heat ratio disagree (gamma != 1 + 1/c_v).
    #[error(
        "inconsistent gas properties: gamma = {gamma}, c_v = {c_v} (expected gamma = 1 + 1/c_v)"
    )]
    Consistency { gamma: f64, c_v: f64 },

    #[error("efficiency undefined: {0}")]
    UndefinedEfficiency(String),

    #[error("load profiles are not sampled at the same angles: {0}")]
    Alignment(String),

    #[error("infeasible target: {0}")]
    InfeasibleTarget(String),

    #[error(
        "no complete heater cycles left to analyze ({found} found, {skipped} skipped for warm-up)"
    )]
    NoCycles { found: usize, skipped: usize },

    #[error("ratio grid has no feasible cell to render")]
    EmptyRegion,

    #[error("missing column `{column}` in {path}")]
    Schema { column: String, path: PathBuf },

    #[error("bad data at row {row} of {path}: {message}")]
    Data {
        row: usize,
        path: PathBuf,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn constraint(msg: impl Into<String>) -> Self {
        Error::Constraint(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
