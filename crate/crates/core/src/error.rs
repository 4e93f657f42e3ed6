use std::fmt;

use thiserror::Error;

/// Malformed input text, with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub pos: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(pos: usize, message: impl Into<String>) -> Self {
        ParseError {
            pos,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at offset {}: {}", self.pos, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("undeclared constant `{0}`")]
    UndeclaredConstant(String),
    #[error("constant `{0}` is not defined by the axiom set")]
    UndefinedConstant(String),
    #[error("natural theory shape violation: {0}")]
    NaturalShapeViolation(String),
    #[error("type universe has {size} members, over the cap of {cap}")]
    UniverseTooLarge { size: usize, cap: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
