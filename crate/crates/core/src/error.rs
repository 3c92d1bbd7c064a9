use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("enumeration budget of {budget} iterations exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("theta {0:?} is not generic")]
    NonGeneric(Vec<i64>),
    #[error("coordinates are not integral: {0}")]
    NotIntegral(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
