//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("time grid does not cover the envelope support ({0})")]
    GridCoverage(String),

    #[error("insufficient samples: need at least {needed}, have {have}")]
    InsufficientSamples { needed: usize, have: usize },

    #[error("conservation drift {drift:.3e} exceeds 1e-6 at t = {time:.6}; grid under-resolved")]
    ConservationViolation { drift: f64, time: f64 },

    #[error("half maximum not crossed within the sampled range ({0})")]
    RangeTooNarrow(String),

    #[error("curve has no unique interior maximum")]
    NoInteriorMaximum,

    #[error("evaluation grid too coarse: spacing {spacing:.3e} exceeds {limit:.3e}")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("fit did not converge after {iterations} iterations (residual {residual:.3e})")]
    FitNonConvergence { iterations: usize, residual: f64 },

    #[error("config error in field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("estimate below numerical floor: {0}")]
    BelowFloor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
