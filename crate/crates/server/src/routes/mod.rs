//! Routes under `/api/v1`. Every route except login requires a session token.

mod annotate;
mod auth;
mod concordance;
mod documents;
mod entities;
mod metadata;
mod reconcile;

use std::sync::Arc;

use axum::routing::{get, post, put};
use axum::Router;

use crate::error::ApiError;
use crate::state::AppState;

pub use concordance::concordance_config;
pub use documents::{document_from_upload, UploadFormat};

pub const PREFIX: &str = "/api/v1";

pub fn router(state: Arc<AppState>) -> Router {
    let api = Router::new()
        .route("/auth/login", post(auth::login))
        .route("/auth/password", post(auth::change_password))
        .route("/documents", get(documents::list).post(documents::upload))
        .route("/documents/{doc_id}", get(documents::get).put(documents::save))
        .route("/documents/{doc_id}/html", get(documents::html))
        .route("/documents/{doc_id}/tei", get(documents::tei))
        .route("/documents/{doc_id}/status", put(documents::set_status))
        .route("/documents/{doc_id}/mark", post(annotate::mark))
        .route("/documents/{doc_id}/extend-to-word", post(annotate::extend_to_word))
        .route("/documents/{doc_id}/highlight-all", post(annotate::highlight_all))
        .route("/documents/{doc_id}/merge", post(annotate::merge))
        .route("/documents/{doc_id}/move-mention", post(annotate::move_mention))
        .route("/documents/{doc_id}/relabel", post(annotate::relabel))
        .route("/documents/{doc_id}/sort-key", post(annotate::sort_key))
        .route("/documents/{doc_id}/alias", post(annotate::alias))
        .route("/documents/{doc_id}/location", post(annotate::location))
        .route("/documents/{doc_id}/empty-trash", post(annotate::empty_trash))
        .route("/documents/{doc_id}/entities", get(concordance::entities))
        .route("/documents/{doc_id}/concordance", get(concordance::entries))
        .route("/documents/{doc_id}/entities/export", get(entities::export))
        .route("/documents/{doc_id}/entities/import", post(entities::import))
        .route("/documents/{doc_id}/link", post(reconcile::link))
        .route("/documents/{doc_id}/unlink", post(reconcile::unlink))
        .route("/documents/{doc_id}/metadata", get(metadata::get).put(metadata::put))
        .route("/reconcile/search", get(reconcile::search))
        .route("/reconcile/details/{qid}", get(reconcile::details))
        .fallback(|| async { ApiError::not_found("no such route") })
        .with_state(state);
    Router::new().nest(PREFIX, api)
}
