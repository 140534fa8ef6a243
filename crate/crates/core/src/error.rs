use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("2-adic valuation of zero is infinite")]
    ZeroValuation,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("element is not invertible")]
    NotInvertible,
    #[error("curve is singular")]
    Singular,
    #[error("effort budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("graph is not a volcano: {0}")]
    NotAVolcano(String),
    #[error("operands belong to different fields")]
    FieldMismatch,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
