use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SparqlError {
    #[error("UnknownProperty: {0}")]
    UnknownProperty(String),
    #[error("ArityMismatch: {0}")]
    ArityMismatch(String),
    #[error("UnsupportedConstruct: {0}")]
    Unsupported(String),
    #[error("InvariantViolation: {0}")]
    InvariantViolation(String),
    #[error("EmissionBug: {0}")]
    EmissionBug(String),
}
