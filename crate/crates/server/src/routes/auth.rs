use std::sync::Arc;

use axum::extract::State;
use axum::http::StatusCode;
use kwicdesk_store::User;
use serde::{Deserialize, Serialize};

use crate::error::ApiError;
use crate::extract::{Auth, Json};
use crate::state::AppState;

#[derive(Deserialize)]
pub struct LoginRequest {
    username: String,
    password: String,
}

#[derive(Serialize)]
pub struct LoginResponse {
    token: String,
    expires_in: u64,
    user: User,
}

fn join_error(e: tokio::task::JoinError) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "InternalError", e.to_string())
}

pub async fn login(
    State(state): State<Arc<AppState>>,
    Json(req): Json<LoginRequest>,
) -> Result<axum::Json<LoginResponse>, ApiError> {
    // Password hashing is deliberately slow; keep it off the async workers.
    let s = state.clone();
    let user = tokio::task::spawn_blocking(move || s.accounts.verify(&req.username, &req.password))
        .await
        .map_err(join_error)??;
    Ok(axum::Json(LoginResponse {
        token: state.tokens.issue(&user),
        expires_in: state.tokens.lifetime().as_secs(),
        user,
    }))
}

#[derive(Deserialize)]
pub struct PasswordRequest {
    old_password: String,
    new_password: String,
}

pub async fn change_password(
    State(state): State<Arc<AppState>>,
    Auth(claims): Auth,
    Json(req): Json<PasswordRequest>,
) -> Result<StatusCode, ApiError> {
    let s = state.clone();
    tokio::task::spawn_blocking(move || s.accounts.change_password(&claims.sub, &req.old_password, &req.new_password))
        .await
        .map_err(join_error)??;
    Ok(StatusCode::NO_CONTENT)
}
