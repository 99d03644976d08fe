use std::sync::Arc;

use axum::extract::State;
use kwicdesk_core::MetadataRecord;
use kwicdesk_store::{Revision, StoreError};
use serde::Deserialize;

use crate::error::ApiError;
use crate::extract::{Auth, Json, Path};
use crate::state::{AppState, Mutation};

/// `null` until a record has been stored.
pub async fn get(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
) -> Result<axum::Json<Option<MetadataRecord>>, ApiError> {
    Ok(axum::Json(state.store.get_metadata(&doc_id)?))
}

#[derive(Deserialize)]
pub struct PutRequest {
    record: MetadataRecord,
    base_revision: Option<Revision>,
}

pub async fn put(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<PutRequest>,
) -> Result<axum::Json<Mutation<MetadataRecord>>, ApiError> {
    let revision = state
        .locked(&doc_id, || {
            if let Some(base) = req.base_revision {
                let current = state.store.load(&doc_id)?.revision;
                if base != current {
                    return Err(StoreError::Conflict { doc_id: doc_id.clone(), base, current }.into());
                }
            }
            Ok(state.store.upsert_metadata(&doc_id, &req.record)?)
        })
        .await?;
    Ok(axum::Json(Mutation {
        revision,
        result: req.record,
    }))
}
