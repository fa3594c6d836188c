use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SqlError {
    #[error("SyntaxError at byte {position} near '{token}': {message}")]
    Syntax {
        position: usize,
        token: String,
        message: String,
    },
    #[error("UnknownIdentifier: {0}")]
    UnknownIdentifier(String),
    #[error("AmbiguousIdentifier: {0}")]
    AmbiguousIdentifier(String),
    #[error("UnsupportedConstruct: {0}")]
    Unsupported(String),
    #[error("TypeMismatch: {0}")]
    TypeMismatch(String),
    #[error("ArityMismatch: {0}")]
    ArityMismatch(String),
}

impl SqlError {
    pub fn unsupported(construct: impl Into<String>) -> SqlError {
        SqlError::Unsupported(construct.into())
    }
}
