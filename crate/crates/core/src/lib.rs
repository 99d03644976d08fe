//! Stand-off entity annotation of plain-text documents.
//!
//! - [`model`]: documents, mentions, entities, categories.
//! - [`engine`]: marking, highlight-all, merging, scrap/trash lifecycle.
//! - [`concordance`]: KWIC / KWOC / KWAC indexes of an entity's mentions.
//! - [`rdfa`], [`tei`], [`interchange`]: serialization.
//! - [`metadata`]: the bibliographic record attached to a document.

pub mod concordance;
pub mod engine;
pub mod error;
pub mod interchange;
pub mod metadata;
pub mod model;
pub mod rdfa;
pub mod tei;

pub use concordance::{build_index, list_entities, ConcordanceConfig, ConcordanceEntry, SortOrder, Style};
pub use error::{AnnotationError, ImportError, ParseError};
pub use interchange::{export_entities, import_entities};
pub use metadata::{MetadataRecord, ValidationError};
pub use model::{
    entity_id_from_label, Category, CategoryKind, Corpus, Document, DocumentStatus, Entity, Location,
    Mention, Qid, Span,
};
pub use rdfa::{parse_rdfa, render_rdfa};
pub use tei::export_tei;
