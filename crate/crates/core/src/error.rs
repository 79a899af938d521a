use alloc::string::String;

/// Errors raised by the solvers and operator builders.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("boundary mismatch: {0}")]
    BoundaryMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e}, target {target:e})")]
    NotConverged {
        iterations: usize,
        residual: f64,
        target: f64,
    },

    #[error("SCF did not converge after {iterations} iterations (last density change {last_change:e})")]
    ScfNotConverged {
        iterations: usize,
        last_change: f64,
        history: alloc::vec::Vec<f64>,
    },

    #[error("norm drift {drift:e} exceeds {limit:e} at step {step}")]
    NormDrift { step: usize, drift: f64, limit: f64 },

    #[error("density underflows everywhere")]
    EmptyDensity,

    #[error("internal assembly error: {0}")]
    Assembly(String),
}

pub type Result<T> = core::result::Result<T, Error>;
