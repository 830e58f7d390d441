use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("coefficient {coeff} is not reduced modulo {p}")]
    CoefficientRange { coeff: u64, p: u32 },
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("{0} is not a monic irreducible")]
    NotPrime(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("budget exceeded: needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("exactness failure: {0}")]
    Inexact(String),
}

pub type Result<T> = std::result::Result<T, Error>;
