use thiserror::Error;

use crate::engine::Loop;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("channels {first} and {second} overlap after smoothing (gap {gap:.3e} rad)")]
    ChannelOverlap {
        first: String,
        second: String,
        gap: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate flat: {0}")]
    DegenerateFlat(String),

    #[error("cohomology class {0:?} lies outside the subspace c_n = 0")]
    SubspaceViolation(Vec<f64>),

    #[error("channel index {index} out of range (model has {count} B channels)")]
    ChannelIndex { index: usize, count: usize },

    #[error("perturbation norm {measured:.3e} exceeds bound {bound:.3e}")]
    NormViolation { measured: f64, bound: f64 },

    #[error("loop minimization diverged after {iterations} iterations: {reason}")]
    Divergence {
        iterations: usize,
        reason: String,
        last_valid: Box<Loop>,
    },

    #[error("all {attempts} restarts failed for homology {h:?}: {diagnostics}")]
    AllRestartsFailed {
        h: Vec<i64>,
        attempts: usize,
        diagnostics: String,
    },

    #[error("empty grid")]
    EmptyGrid,

    #[error("no lattice point within tolerance of the requested level")]
    EmptyMembership,

    #[error("function evaluation failed at probe {point:?}: {reason}")]
    Probe { point: Vec<f64>, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
