use std::collections::BTreeMap;
use std::sync::Mutex;

use kwicdesk_core::{Document, MetadataRecord};

use crate::{check_base, check_document, DocumentStore, DocumentSummary, Revision, StoreError, StoredDocument};

struct Entry {
    stored: StoredDocument,
    metadata: Option<MetadataRecord>,
}

#[derive(Default)]
pub struct MemoryStore {
    docs: Mutex<BTreeMap<String, Entry>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }
}

impl DocumentStore for MemoryStore {
    fn create(&self, doc: &Document) -> Result<Revision, StoreError> {
        check_document(doc)?;
        let mut docs = self.docs.lock().unwrap();
        if docs.contains_key(&doc.doc_id) {
            return Err(StoreError::DuplicateDocument(doc.doc_id.clone()));
        }
        let stored = StoredDocument {
            revision: 1,
            document: doc.clone(),
        };
        docs.insert(doc.doc_id.clone(), Entry { stored, metadata: None });
        Ok(1)
    }

    fn save(&self, doc: &Document, base: Option<Revision>) -> Result<Revision, StoreError> {
        check_document(doc)?;
        let mut docs = self.docs.lock().unwrap();
        let entry = docs
            .get_mut(&doc.doc_id)
            .ok_or_else(|| StoreError::UnknownDocument(doc.doc_id.clone()))?;
        check_base(&doc.doc_id, base, entry.stored.revision)?;
        entry.stored.revision += 1;
        entry.stored.document = doc.clone();
        Ok(entry.stored.revision)
    }

    fn load(&self, doc_id: &str) -> Result<StoredDocument, StoreError> {
        let docs = self.docs.lock().unwrap();
        docs.get(doc_id)
            .map(|e| e.stored.clone())
            .ok_or_else(|| StoreError::UnknownDocument(doc_id.to_string()))
    }

    fn list(&self) -> Result<Vec<DocumentSummary>, StoreError> {
        let docs = self.docs.lock().unwrap();
        Ok(docs
            .values()
            .map(|e| DocumentSummary::of(&e.stored, e.metadata.is_some()))
            .collect())
    }

    fn get_metadata(&self, doc_id: &str) -> Result<Option<MetadataRecord>, StoreError> {
        let docs = self.docs.lock().unwrap();
        docs.get(doc_id)
            .map(|e| e.metadata.clone())
            .ok_or_else(|| StoreError::UnknownDocument(doc_id.to_string()))
    }

    fn upsert_metadata(&self, doc_id: &str, record: &MetadataRecord) -> Result<Revision, StoreError> {
        let mut docs = self.docs.lock().unwrap();
        let entry = docs
            .get_mut(doc_id)
            .ok_or_else(|| StoreError::UnknownDocument(doc_id.to_string()))?;
        record.validate()?;
        entry.metadata = Some(record.clone());
        entry.stored.document.metadata_id = Some(doc_id.to_string());
        entry.stored.revision += 1;
        Ok(entry.stored.revision)
    }
}
