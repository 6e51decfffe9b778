use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),
    #[error("division by a jet with zero constant term")]
    ZeroConstantTerm,
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("insufficient coefficients: need {needed}, have {available}")]
    InsufficientCoefficients { needed: usize, available: usize },
    #[error("jet order too low: need {needed}, have {available}")]
    Order { needed: usize, available: usize },
    #[error("accuracy target not reached: {0}")]
    Accuracy(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
