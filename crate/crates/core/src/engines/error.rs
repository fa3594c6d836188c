use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    #[error("EvaluationTypeError: {0}")]
    EvaluationType(String),
    #[error("UnsupportedSparql: {0}")]
    UnsupportedSparql(String),
    #[error("invalid input: {0}")]
    Input(String),
}
