use thiserror::Error;

use crate::model::Location;

/// Errors raised by the document model and the annotation engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error("document `{0}` already exists")]
    DuplicateDocument(String),
    #[error("unknown document `{0}`")]
    UnknownDocument(String),
    #[error("document text contains a NUL character at offset {0}")]
    InvalidText(usize),
    #[error("label is empty")]
    InvalidLabel,
    #[error("selection is empty")]
    EmptySelection,
    #[error("selection {start}..{end} is outside the text (length {len})")]
    SelectionOutOfBounds { start: usize, end: usize, len: usize },
    #[error("selection overlaps existing mention `{0}`")]
    OverlappingMention(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("unknown mention `{0}`")]
    UnknownMention(String),
    #[error("cannot merge entity `{0}` into itself")]
    SelfMerge(String),
    #[error("category mismatch: expected `{expected}`, found `{found}`")]
    CategoryMismatch { expected: String, found: String },
    #[error("entity `{0}` is not active")]
    EntityTrashed(String),
    #[error("entity `{entity_id}` is already in {location}")]
    AlreadyInLocation { entity_id: String, location: Location },
    #[error("entity `{0}` is not linked to Wikidata")]
    NotLinked(String),
    #[error("`{0}` is not a Wikidata item identifier")]
    InvalidQid(String),
    #[error("invalid concordance configuration: {0}")]
    InvalidConfig(String),
}

/// A structural problem found while reading annotated HTML.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{location}: {message}")]
pub struct ParseError {
    pub location: String,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(location: impl Into<String>, message: impl Into<String>) -> Self {
        ParseError {
            location: location.into(),
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImportError {
    #[error("entity list does not match the interchange schema: {0}")]
    Schema(String),
    #[error("unknown category `{0}`")]
    UnknownCategory(String),
}
