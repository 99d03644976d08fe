use kwicdesk_core::AnnotationError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconcileError {
    #[error("search label is empty")]
    InvalidLabel,
    #[error("`{0}` is not a Wikidata identifier")]
    InvalidQid(String),
    #[error("Wikidata has no record {0}")]
    NotFound(String),
    /// Network or remote failure. Callers may retry.
    #[error("Wikidata is unavailable: {0}")]
    Unavailable(String),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
}
