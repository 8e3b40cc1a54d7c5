use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group error: {0}")]
    Group(String),
    #[error("expected {expected} coordinates, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("root order must be positive, got {0}")]
    NonPositiveOrder(BigInt),
    #[error("unknown variable {0}")]
    UnknownVariable(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("polynomial `{poly}` is not homogeneous: {detail}")]
    Inhomogeneous { poly: String, detail: String },
    #[error("invalid fan: {0}")]
    InvalidFan(String),
    #[error("generic stabilizer is not finite: {0}")]
    InfiniteStabilizer(String),
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Document(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
