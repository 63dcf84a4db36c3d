use std::path::PathBuf;

use thiserror::Error;

/// Errors produced across the library.
#[derive(Debug, Error)]
pub enum Error {
    /// The input points do not span the ambient space.
    #[error("degenerate input: affine rank {rank} < dimension {dim}")]
    DegenerateInput { rank: usize, dim: usize },

    /// The hull builder lost combinatorial consistency on every tolerance rung.
    #[error("hull construction failed: {0}")]
    HullConstruction(String),

    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("direction is not a unit vector (norm {norm})")]
    NonUnitVector { norm: f64 },

    /// Exact intrinsic volumes are only available for `j ∈ {0, n-1, n}`.
    #[error("intrinsic volume index {j} has no exact formula in dimension {n}")]
    UnsupportedIndex { j: usize, n: usize },

    #[error("parameter `{name}` out of range: {detail}")]
    OutOfRange { name: &'static str, detail: String },

    #[error("invalid body: {0}")]
    InvalidBody(String),

    #[error("root finding did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("sample too small: need {need}, got {got}")]
    SampleTooSmall { need: usize, got: usize },

    #[error("config error at {location}: {message}")]
    Config { location: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

impl Error {
    pub(crate) fn out_of_range(name: &'static str, detail: impl Into<String>) -> Self {
        Error::OutOfRange {
            name,
            detail: detail.into(),
        }
    }

    /// True for failures that stem from the numerics rather than from the caller's input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::DegenerateInput { .. }
                | Error::HullConstruction(_)
                | Error::NoConvergence { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
