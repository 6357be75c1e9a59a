use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(String),
    #[error("unknown cell `{0}`")]
    UnknownCell(String),
    #[error("cell set is not open (not closed upward): {0}")]
    NotOpen(String),
    #[error("cell set is not locally closed: {0}")]
    NotLocallyClosed(String),
    #[error("invalid poset: {0}")]
    InvalidPoset(String),
    #[error("invalid complex: {0}")]
    InvalidComplex(String),
    #[error("base spaces differ")]
    BaseMismatch,
    #[error("{0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
