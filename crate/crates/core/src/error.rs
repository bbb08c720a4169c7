use thiserror::Error;

/// Errors raised across the pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unbound circuit parameter slot {0}")]
    UnboundParameter(usize),
    #[error("non-Hermitian operator: {0}")]
    NonHermitian(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("regularization failed: {0}")]
    Regularization(String),
    #[error("self-energy pole: {0}")]
    SigmaPole(String),
    #[error("not converged: {0}")]
    Unconverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
