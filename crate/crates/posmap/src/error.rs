use thiserror::Error;

/// Errors produced by map construction, kernel generation and certification.
#[derive(Debug, Error)]
pub enum Error {
    /// Operand shapes are incompatible with the operation.
    #[error("dimension error: {0}")]
    Dimension(String),

    /// Input is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A stated precondition does not hold for the given input.
    #[error("precondition error: {0}")]
    Precondition(String),

    /// A conjugation pair is not usable (wrong size or numerically singular).
    #[error("invalid conjugator: {0}")]
    InvalidConjugator(String),
}

pub type Result<T> = std::result::Result<T, Error>;
