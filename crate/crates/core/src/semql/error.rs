use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum SemQlError {
    #[error("UnsupportedConstruct: {0}")]
    Unsupported(String),
    #[error("ProjectionOverflow: {0} projection items, at most {max} allowed", max = super::tree::MAX_PROJECTIONS)]
    ProjectionOverflow(usize),
    #[error("GrammarViolation: {0}")]
    Grammar(String),
}

impl SemQlError {
    pub fn unsupported(construct: impl Into<String>) -> SemQlError {
        SemQlError::Unsupported(construct.into())
    }
}
