pub mod gadget;
pub mod reduction;
pub mod spectrum;
pub mod xi;

use std::fmt;

use crate::config::ConfigError;

/// How a run ended; maps onto the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Stable,
    /// A limit did not settle within its budget.
    Unstable,
    /// Named invariants that were expected to hold and did not.
    InvariantFailed(Vec<String>),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Stable => 0,
            Outcome::Unstable => 2,
            Outcome::InvariantFailed(_) => 3,
        }
    }

    /// Invariant failures win over instability.
    pub fn combine(stable: bool, failed: Vec<String>) -> Outcome {
        if !failed.is_empty() {
            Outcome::InvariantFailed(failed)
        } else if stable {
            Outcome::Stable
        } else {
            Outcome::Unstable
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Config(String),
    Compute(sci_core::Error),
    Io(std::io::Error),
}

impl RunError {
    pub fn config(msg: impl Into<String>) -> Self {
        RunError::Config(msg.into())
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(m) => write!(f, "invalid config: {m}"),
            RunError::Compute(e) => write!(f, "{e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Config(e.0)
    }
}

impl From<sci_core::Error> for RunError {
    fn from(e: sci_core::Error) -> Self {
        // Parameter problems surface from the core as argument errors.
        match e {
            sci_core::Error::InvalidArgument(m) | sci_core::Error::Parse(m) => RunError::Config(m),
            other => RunError::Compute(other),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(e)
    }
}
