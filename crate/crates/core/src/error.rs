use thiserror::Error;

/// Errors raised by the planning toolkit.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed formula: {0}")]
    MalformedFormula(String),

    #[error("action atom {0} evaluated without a transition context")]
    MissingContext(String),

    #[error("malformed binding: {0}")]
    MalformedBinding(String),

    #[error("malformed action: {0}")]
    MalformedAction(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("mutation set size {size} exceeds the configured cap of {cap}")]
    MutationLimit { size: usize, cap: usize },

    #[error("reachable state space exceeds the cap of {0} states")]
    StateCapExceeded(usize),

    #[error("invalid experiment spec: {0}")]
    BadSpec(String),

    #[error("plan replay failed at step {step}: {msg}")]
    Replay { step: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
