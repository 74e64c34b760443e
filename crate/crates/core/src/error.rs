use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parameter contexts differ")]
    ContextMismatch,
    #[error("graded spaces differ: `{0}` vs `{1}`")]
    SpaceMismatch(String, String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },
    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: i64, found: i64 },
    #[error("element or series is not homogeneous")]
    Inhomogeneous,
    #[error("polynomial degree cap {cap} exceeded (degree {degree})")]
    Truncation { cap: u32, degree: u32 },
    #[error("unknown basis index `{0}`")]
    UnknownBasis(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
