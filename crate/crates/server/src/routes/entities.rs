use std::sync::Arc;

use axum::extract::State;
use axum::http::header;
use axum::response::IntoResponse;
use kwicdesk_core::{export_entities, import_entities};
use kwicdesk_store::Revision;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::extract::{Auth, Path, Query};
use crate::state::{AppState, Mutation};

pub async fn export(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
) -> Result<impl IntoResponse, ApiError> {
    let doc = state.load(&doc_id)?.document;
    Ok(([(header::CONTENT_TYPE, "application/json")], export_entities(&doc)))
}

#[derive(Deserialize)]
pub struct ImportQuery {
    base_revision: Option<Revision>,
}

#[derive(Serialize)]
pub struct Imported {
    imported: usize,
}

/// The body is an exported entity list, taken verbatim.
pub async fn import(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Query(q): Query<ImportQuery>,
    body: String,
) -> Result<axum::Json<Mutation<Imported>>, ApiError> {
    let m = state
        .mutate(&doc_id, q.base_revision, |doc| {
            Ok(Imported {
                imported: import_entities(doc, &body)?,
            })
        })
        .await?;
    Ok(axum::Json(m))
}
