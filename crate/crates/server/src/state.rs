use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use kwicdesk_core::Document;
use kwicdesk_reconcile::WikidataClient;
use kwicdesk_store::{Accounts, DocumentStore, Revision, StoreError, StoredDocument, TokenService};
use serde::Serialize;

use crate::error::ApiError;

pub struct AppState {
    pub store: Arc<dyn DocumentStore>,
    pub accounts: Arc<Accounts>,
    pub tokens: Arc<TokenService>,
    pub wikidata: WikidataClient,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

/// Response body of every document mutation.
#[derive(Debug, Serialize)]
pub struct Mutation<R> {
    pub revision: Revision,
    pub result: R,
}

impl AppState {
    pub fn new(
        store: Arc<dyn DocumentStore>,
        accounts: Arc<Accounts>,
        tokens: Arc<TokenService>,
        wikidata: WikidataClient,
    ) -> Self {
        AppState {
            store,
            accounts,
            tokens,
            wikidata,
            locks: Mutex::new(HashMap::new()),
        }
    }

    fn lock_for(&self, doc_id: &str) -> Arc<tokio::sync::Mutex<()>> {
        self.locks.lock().unwrap().entry(doc_id.to_string()).or_default().clone()
    }

    pub fn load(&self, doc_id: &str) -> Result<StoredDocument, ApiError> {
        Ok(self.store.load(doc_id)?)
    }

    /// Loads the latest revision, applies `f`, and saves the result. Writers
    /// to one document are serialized; a `base` other than the latest
    /// revision is a conflict. Nothing is written when `f` fails.
    pub async fn mutate<R>(
        &self,
        doc_id: &str,
        base: Option<Revision>,
        f: impl FnOnce(&mut Document) -> Result<R, ApiError>,
    ) -> Result<Mutation<R>, ApiError> {
        let lock = self.lock_for(doc_id);
        let _guard = lock.lock().await;
        let stored = self.store.load(doc_id)?;
        if let Some(base) = base.filter(|b| *b != stored.revision) {
            return Err(StoreError::Conflict {
                doc_id: doc_id.to_string(),
                base,
                current: stored.revision,
            }
            .into());
        }
        let mut doc = stored.document;
        let result = f(&mut doc)?;
        let revision = self.store.save(&doc, Some(stored.revision))?;
        Ok(Mutation { revision, result })
    }

    /// Runs `f` while holding the document's write lock.
    pub async fn locked<R>(&self, doc_id: &str, f: impl FnOnce() -> Result<R, ApiError>) -> Result<R, ApiError> {
        let lock = self.lock_for(doc_id);
        let _guard = lock.lock().await;
        f()
    }
}
