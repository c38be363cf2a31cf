use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("argument outside function domain: {0}")]
    Domain(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("invalid weight model: {0}")]
    InvalidWeight(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("no positive root: {0}")]
    NoRoot(String),
    #[error("zero field: {0}")]
    ZeroField(String),
    #[error("instanton support: {0}")]
    Support(String),
    #[error("not enough samples: need {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },
}
