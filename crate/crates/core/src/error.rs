use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("linear program is infeasible")]
    LpInfeasible,
    #[error("linear program is unbounded")]
    LpUnbounded,
    #[error("linear program numerical failure: {0}")]
    LpNumerical(String),
    #[error("rejection sampler exceeded {cap} trials")]
    RejectionCapExceeded { cap: u64 },
    #[error("projection did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("privacy parameters outside the admissible range: {0}")]
    InadmissiblePrivacy(String),
    #[error("boosting found no majority witness")]
    NoMajority,
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
