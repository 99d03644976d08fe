use std::sync::Arc;

use axum::extract::State;
use axum::http::{header, StatusCode};
use axum::response::IntoResponse;
use kwicdesk_core::rdfa::ParseWarning;
use kwicdesk_core::{export_tei, parse_rdfa, render_rdfa, Document, DocumentStatus};
use kwicdesk_store::{DocumentSummary, Revision, StoredDocument};
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::extract::{Auth, Json, Path, Query};
use crate::state::{AppState, Mutation};

#[derive(Deserialize)]
pub struct ListQuery {
    status: Option<String>,
    /// Case-insensitive substring of the document id.
    q: Option<String>,
}

pub async fn list(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Query(query): Query<ListQuery>,
) -> Result<axum::Json<Vec<DocumentSummary>>, ApiError> {
    let status: Option<DocumentStatus> = query
        .status
        .map(|s| s.parse().map_err(|m: String| ApiError::bad_request(m).with_field("status")))
        .transpose()?;
    let needle = query.q.map(|q| q.to_lowercase());
    let docs = state
        .store
        .list()?
        .into_iter()
        .filter(|d| status.is_none_or(|s| d.status == s))
        .filter(|d| needle.as_ref().is_none_or(|n| d.doc_id.to_lowercase().contains(n)))
        .collect();
    Ok(axum::Json(docs))
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UploadFormat {
    /// HTML when the content starts with `<`, plain text otherwise.
    #[default]
    Auto,
    Text,
    Html,
}

#[derive(Deserialize)]
pub struct UploadRequest {
    doc_id: Option<String>,
    content: String,
    #[serde(default)]
    format: UploadFormat,
}

#[derive(Serialize)]
pub struct UploadResponse {
    doc_id: String,
    revision: Revision,
    warnings: Vec<ParseWarning>,
}

/// Builds a document from uploaded text or annotated HTML.
pub fn document_from_upload(
    doc_id: Option<String>,
    content: &str,
    format: UploadFormat,
) -> Result<(Document, Vec<ParseWarning>), ApiError> {
    let html = match format {
        UploadFormat::Html => true,
        UploadFormat::Text => false,
        UploadFormat::Auto => content.trim_start().starts_with('<'),
    };
    let (mut doc, warnings) = if html {
        let parsed = parse_rdfa(content)?;
        (parsed.document, parsed.warnings)
    } else {
        let id = doc_id.clone().unwrap_or_default();
        (Document::new(id, content)?, Vec::new())
    };
    if let Some(id) = doc_id {
        doc.doc_id = id;
    }
    if doc.doc_id.trim().is_empty() {
        return Err(ApiError::bad_request("doc_id is required").with_field("doc_id"));
    }
    Ok((doc, warnings))
}

pub async fn upload(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Json(req): Json<UploadRequest>,
) -> Result<(StatusCode, axum::Json<UploadResponse>), ApiError> {
    let (doc, warnings) = document_from_upload(req.doc_id, &req.content, req.format)?;
    let revision = state.locked(&doc.doc_id, || Ok(state.store.create(&doc)?)).await?;
    let body = UploadResponse {
        doc_id: doc.doc_id,
        revision,
        warnings,
    };
    Ok((StatusCode::CREATED, axum::Json(body)))
}

pub async fn get(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
) -> Result<axum::Json<StoredDocument>, ApiError> {
    Ok(axum::Json(state.load(&doc_id)?))
}

pub async fn html(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    let doc = state.load(&doc_id)?.document;
    Ok(([(header::CONTENT_TYPE, "text/html; charset=utf-8")], render_rdfa(&doc)))
}

pub async fn tei(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    let doc = state.load(&doc_id)?.document;
    let metadata = state.store.get_metadata(&doc_id)?.unwrap_or_default();
    Ok(([(header::CONTENT_TYPE, "application/tei+xml; charset=utf-8")], export_tei(&doc, &metadata)))
}

#[derive(Deserialize)]
pub struct SaveRequest {
    document: Document,
    base_revision: Option<Revision>,
}

/// Replaces the whole annotated state, as the editor's save command does.
pub async fn save(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<SaveRequest>,
) -> Result<axum::Json<Mutation<()>>, ApiError> {
    if req.document.doc_id != doc_id {
        return Err(ApiError::bad_request("document.doc_id does not match the path").with_field("document"));
    }
    let revision = state
        .locked(&doc_id, || Ok(state.store.save(&req.document, req.base_revision)?))
        .await?;
    Ok(axum::Json(Mutation { revision, result: () }))
}

#[derive(Deserialize)]
pub struct StatusRequest {
    status: DocumentStatus,
    base_revision: Option<Revision>,
}

pub async fn set_status(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Json(req): Json<StatusRequest>,
) -> Result<axum::Json<Mutation<DocumentStatus>>, ApiError> {
    let m = state
        .mutate(&doc_id, req.base_revision, |doc| Ok(doc.set_status(req.status).status))
        .await?;
    Ok(axum::Json(m))
}
