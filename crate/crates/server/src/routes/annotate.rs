use std::sync::Arc;

use axum::extract::State;
use kwicdesk_core::{Entity, Location, Mention, Span};
use kwicdesk_store::Revision;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::extract::{Auth, Json, Path};
use crate::state::{AppState, Mutation};

type Reply<R> = Result<axum::Json<Mutation<R>>, ApiError>;

#[derive(Deserialize)]
pub struct SelectionRequest {
    start: usize,
    end: usize,
    category: String,
    base_revision: Option<Revision>,
}

#[derive(Serialize)]
pub struct Marked {
    mention: Mention,
    entity: Entity,
}

pub async fn mark(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<SelectionRequest>,
) -> Reply<Marked> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| {
            let (mention, entity) = doc.mark_selection(Span::new(req.start, req.end), &req.category)?;
            Ok(Marked { mention, entity })
        })
        .await?;
    Ok(axum::Json(m))
}

#[derive(Deserialize)]
pub struct ExtendRequest {
    start: usize,
    end: usize,
}

#[derive(Serialize)]
pub struct Extended {
    start: usize,
    end: usize,
    text: String,
}

/// Preview only; nothing is stored.
pub async fn extend_to_word(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<ExtendRequest>,
) -> Result<axum::Json<Extended>, ApiError> {
    let doc = state.load(&doc_id)?.document;
    let span = doc.extend_to_word(Span::new(req.start, req.end))?;
    Ok(axum::Json(Extended {
        start: span.start,
        end: span.end,
        text: doc.slice(span),
    }))
}

pub async fn highlight_all(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<SelectionRequest>,
) -> Reply<Vec<Mention>> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| {
            Ok(doc.highlight_all_instances(Span::new(req.start, req.end), &req.category)?)
        })
        .await?;
    Ok(axum::Json(m))
}

#[derive(Deserialize)]
pub struct MergeRequest {
    source: String,
    target: String,
    base_revision: Option<Revision>,
}

pub async fn merge(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<MergeRequest>,
) -> Reply<Entity> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| Ok(doc.merge_entities(&req.source, &req.target)?))
        .await?;
    Ok(axum::Json(m))
}

#[derive(Deserialize)]
pub struct MoveMentionRequest {
    mention_id: String,
    target: String,
    base_revision: Option<Revision>,
}

pub async fn move_mention(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<MoveMentionRequest>,
) -> Reply<Mention> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| Ok(doc.move_mention(&req.mention_id, &req.target)?))
        .await?;
    Ok(axum::Json(m))
}

#[derive(Deserialize)]
pub struct RelabelRequest {
    entity_id: String,
    label: String,
    base_revision: Option<Revision>,
}

pub async fn relabel(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<RelabelRequest>,
) -> Reply<Entity> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| Ok(doc.relabel_entity(&req.entity_id, &req.label)?))
        .await?;
    Ok(axum::Json(m))
}

#[derive(Deserialize)]
pub struct SortKeyRequest {
    entity_id: String,
    sort_key: String,
    base_revision: Option<Revision>,
}

pub async fn sort_key(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<SortKeyRequest>,
) -> Reply<Entity> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| Ok(doc.set_sort_key(&req.entity_id, &req.sort_key)?))
        .await?;
    Ok(axum::Json(m))
}

#[derive(Deserialize)]
pub struct AliasRequest {
    entity_id: String,
    alias: String,
    base_revision: Option<Revision>,
}

pub async fn alias(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<AliasRequest>,
) -> Reply<Entity> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| Ok(doc.add_alias(&req.entity_id, &req.alias)?))
        .await?;
    Ok(axum::Json(m))
}

#[derive(Deserialize)]
pub struct LocationRequest {
    entity_id: String,
    location: Location,
    base_revision: Option<Revision>,
}

/// Scrap, trash and restore.
pub async fn location(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<LocationRequest>,
) -> Reply<Entity> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| Ok(doc.move_to(&req.entity_id, req.location)?))
        .await?;
    Ok(axum::Json(m))
}

#[derive(Deserialize, Default)]
pub struct EmptyTrashRequest {
    base_revision: Option<Revision>,
}

#[derive(Serialize)]
pub struct Purged {
    purged: usize,
}

pub async fn empty_trash(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    body: axum::body::Bytes,
) -> Reply<Purged> {
    // The body is optional here.
    let req: EmptyTrashRequest = if body.iter().all(u8::is_ascii_whitespace) {
        EmptyTrashRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ApiError::bad_request(e.to_string()))?
    };
    let base = req.base_revision;
    let m = state
        .mutate(&doc_id, base, |doc| Ok(Purged { purged: doc.empty_trash() }))
        .await?;
    Ok(axum::Json(m))
}
