//! Persistence for annotated documents and their metadata records, plus user
//! accounts and session tokens.
//!
//! [`DocumentStore`] is the pluggable interface; [`FileStore`] keeps one
//! directory per document and [`MemoryStore`] keeps everything in memory.

pub mod accounts;
pub mod auth;
mod file;
mod memory;

use kwicdesk_core::{Document, DocumentStatus, MetadataRecord, ValidationError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use accounts::{Accounts, Role, User};
pub use auth::{AuthError, Claims, Clock, SystemClock, TokenService, DEFAULT_TOKEN_LIFETIME};
pub use file::FileStore;
pub use memory::MemoryStore;

/// Per-document revision number. Every successful write returns a larger one.
pub type Revision = u64;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown document `{0}`")]
    UnknownDocument(String),
    #[error("document `{0}` already exists")]
    DuplicateDocument(String),
    #[error("document `{doc_id}` is at revision {current}, not {base}")]
    Conflict { doc_id: String, base: Revision, current: Revision },
    #[error(transparent)]
    Validation(#[from] ValidationError),
    #[error("invalid document: {0}")]
    InvalidDocument(String),
    #[error("storage failure: {0}")]
    Storage(String),
}

impl From<std::io::Error> for StoreError {
    fn from(e: std::io::Error) -> Self {
        StoreError::Storage(e.to_string())
    }
}

impl From<serde_json::Error> for StoreError {
    fn from(e: serde_json::Error) -> Self {
        StoreError::Storage(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredDocument {
    pub revision: Revision,
    pub document: Document,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentSummary {
    pub doc_id: String,
    pub status: DocumentStatus,
    pub revision: Revision,
    pub mentions: usize,
    pub has_metadata: bool,
}

impl DocumentSummary {
    fn of(stored: &StoredDocument, has_metadata: bool) -> Self {
        DocumentSummary {
            doc_id: stored.document.doc_id.clone(),
            status: stored.document.status,
            revision: stored.revision,
            mentions: stored.document.mentions.len(),
            has_metadata,
        }
    }
}

pub trait DocumentStore: Send + Sync {
    /// Stores a new document at revision 1.
    fn create(&self, doc: &Document) -> Result<Revision, StoreError>;

    /// Replaces the stored state. With `base`, the save is rejected unless
    /// the stored revision still equals it.
    fn save(&self, doc: &Document, base: Option<Revision>) -> Result<Revision, StoreError>;

    fn load(&self, doc_id: &str) -> Result<StoredDocument, StoreError>;

    /// All documents, ordered by id.
    fn list(&self) -> Result<Vec<DocumentSummary>, StoreError>;

    fn get_metadata(&self, doc_id: &str) -> Result<Option<MetadataRecord>, StoreError>;

    /// Validates and stores the document's metadata record, replacing any
    /// previous one. Bumps the document revision.
    fn upsert_metadata(&self, doc_id: &str, record: &MetadataRecord) -> Result<Revision, StoreError>;
}

fn check_document(doc: &Document) -> Result<(), StoreError> {
    match doc.invariant_violations().first() {
        Some(v) => Err(StoreError::InvalidDocument(v.clone())),
        None => Ok(()),
    }
}

fn check_base(doc_id: &str, base: Option<Revision>, current: Revision) -> Result<(), StoreError> {
    match base {
        Some(base) if base != current => Err(StoreError::Conflict {
            doc_id: doc_id.to_string(),
            base,
            current,
        }),
        _ => Ok(()),
    }
}
