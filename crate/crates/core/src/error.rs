use thiserror::Error;

/// Errors produced by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A matrix or vector contained NaN or an infinity.
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    /// Operand shapes do not conform.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An argument violated its documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative factorization failed to converge.
    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    /// Matrix text could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
