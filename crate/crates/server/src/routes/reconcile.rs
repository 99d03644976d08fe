use std::sync::Arc;

use axum::extract::State;
use kwicdesk_core::{AnnotationError, Entity, Qid};
use kwicdesk_reconcile::{apply_link, unlink_entity, EntityDetails, LinkOutcome, ReconcileError, WikidataCandidate};
use kwicdesk_store::Revision;
use serde::Deserialize;

use crate::error::ApiError;
use crate::extract::{Auth, Json, Path, Query};
use crate::state::{AppState, Mutation};

#[derive(Deserialize)]
pub struct SearchQuery {
    label: String,
    limit: Option<usize>,
}

pub async fn search(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Query(q): Query<SearchQuery>,
) -> Result<axum::Json<Vec<WikidataCandidate>>, ApiError> {
    if q.limit == Some(0) {
        return Err(ApiError::bad_request("limit must be positive").with_field("limit"));
    }
    Ok(axum::Json(state.wikidata.search_candidates(&q.label, q.limit).await?))
}

pub async fn details(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(qid): Path<String>,
) -> Result<axum::Json<EntityDetails>, ApiError> {
    Ok(axum::Json(state.wikidata.fetch_details(&qid).await?))
}

#[derive(Deserialize)]
pub struct LinkRequest {
    entity_id: String,
    qid: String,
    base_revision: Option<Revision>,
}

/// Fetches the record outside the document lock, then links. An unavailable
/// service still links, without a Treccani identifier.
pub async fn link(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<LinkRequest>,
) -> Result<axum::Json<Mutation<LinkOutcome>>, ApiError> {
    let qid = Qid::parse(&req.qid).map_err(|_| ReconcileError::InvalidQid(req.qid.clone()))?;
    let doc = state.load(&doc_id)?.document;
    if doc.entity(&req.entity_id).is_none() {
        return Err(AnnotationError::UnknownEntity(req.entity_id).into());
    }
    let details = match state.wikidata.fetch_details(qid.as_str()).await {
        Ok(d) => Some(d),
        Err(ReconcileError::Unavailable(reason)) => {
            tracing::warn!(entity = %req.entity_id, "linking without details: {reason}");
            None
        }
        Err(e) => return Err(e.into()),
    };
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| Ok(apply_link(doc, &req.entity_id, qid, details)?))
        .await?;
    Ok(axum::Json(m))
}

#[derive(Deserialize)]
pub struct UnlinkRequest {
    entity_id: String,
    base_revision: Option<Revision>,
}

pub async fn unlink(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<UnlinkRequest>,
) -> Result<axum::Json<Mutation<Entity>>, ApiError> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| Ok(unlink_entity(doc, &req.entity_id)?))
        .await?;
    Ok(axum::Json(m))
}
