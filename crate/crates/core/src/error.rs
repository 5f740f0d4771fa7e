use thiserror::Error;

/// Errors produced by the core algorithms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed input: {0}")]
    Parse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("quadrature depth {n1} too coarse: need at least {required}")]
    InsufficientResolution { n1: usize, required: usize },

    #[error("method {method} not applicable: {reason}")]
    NotApplicable { method: &'static str, reason: String },

    #[error("exhaustive enumeration at depth {depth} exceeds cap {cap}")]
    ExhaustiveCapExceeded { depth: usize, cap: usize },

    #[error("tree is not downward closed: {0}")]
    NotDownwardClosed(String),

    #[error("modulus of continuity not certified: {0}")]
    Uncertified(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
