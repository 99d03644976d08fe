use std::sync::Arc;

use axum::extract::State;
use kwicdesk_core::concordance::EntitySummary;
use kwicdesk_core::{build_index, list_entities, ConcordanceConfig, ConcordanceEntry, SortOrder, Style};
use serde::Deserialize;

use crate::error::ApiError;
use crate::extract::{Auth, Path, Query};
use crate::state::AppState;

#[derive(Deserialize)]
pub struct EntitiesQuery {
    category: String,
}

pub async fn entities(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Query(q): Query<EntitiesQuery>,
) -> Result<axum::Json<Vec<EntitySummary>>, ApiError> {
    let doc = state.load(&doc_id)?.document;
    Ok(axum::Json(list_entities(&doc, &q.category)?))
}

#[derive(Deserialize)]
pub struct ConcordanceQuery {
    entity: String,
    style: Option<String>,
    window: Option<usize>,
    sort: Option<String>,
}

/// Parses concordance options given as strings, as they arrive from query
/// strings and command-line flags.
pub fn concordance_config(
    style: Option<&str>,
    window: Option<usize>,
    sort: Option<&str>,
) -> Result<ConcordanceConfig, ApiError> {
    let mut cfg = ConcordanceConfig::default();
    if let Some(s) = style {
        cfg.style = s.parse::<Style>().map_err(|e| ApiError::from(e).with_field("style"))?;
    }
    if let Some(w) = window {
        cfg.window_words = w;
    }
    if let Some(s) = sort {
        cfg.sort = s.parse::<SortOrder>().map_err(|e| ApiError::from(e).with_field("sort"))?;
    }
    Ok(cfg)
}

pub async fn entries(
    State(state): State<Arc<AppState>>,
    _auth: Auth,
    Path(doc_id): Path<String>,
    Query(q): Query<ConcordanceQuery>,
) -> Result<axum::Json<Vec<ConcordanceEntry>>, ApiError> {
    let cfg = concordance_config(q.style.as_deref(), q.window, q.sort.as_deref())?;
    let doc = state.load(&doc_id)?.document;
    let entries = build_index(&doc, &q.entity, &cfg).map_err(|e| match ApiError::from(e) {
        err if err.code == "InvalidConfig" => err.with_field("window"),
        err => err,
    })?;
    Ok(axum::Json(entries))
}
