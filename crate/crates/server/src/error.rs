//! The API error body and the mapping from every module error onto it.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use kwicdesk_core::{AnnotationError, ImportError, ParseError};
use kwicdesk_reconcile::ReconcileError;
use kwicdesk_store::{AuthError, StoreError};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
}

impl ApiError {
    pub fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status: status.as_u16(),
            code: code.to_string(),
            message: message.into(),
            field: None,
        }
    }

    pub fn with_field(mut self, field: &str) -> Self {
        self.field = Some(field.to_string());
        self
    }

    pub fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "BadRequest", message)
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "NotFound", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        if status.is_server_error() {
            tracing::error!(code = %self.code, "{}", self.message);
        }
        (status, Json(self)).into_response()
    }
}

impl From<AnnotationError> for ApiError {
    fn from(e: AnnotationError) -> Self {
        use AnnotationError as E;
        let (status, code, field) = match &e {
            E::DuplicateDocument(_) => (StatusCode::CONFLICT, "DuplicateDocument", Some("doc_id")),
            E::UnknownDocument(_) => (StatusCode::NOT_FOUND, "UnknownDocument", None),
            E::InvalidText(_) => (StatusCode::UNPROCESSABLE_ENTITY, "InvalidText", Some("content")),
            E::InvalidLabel => (StatusCode::UNPROCESSABLE_ENTITY, "InvalidLabel", Some("label")),
            E::EmptySelection => (StatusCode::UNPROCESSABLE_ENTITY, "EmptySelection", None),
            E::SelectionOutOfBounds { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "SelectionOutOfBounds", None),
            E::OverlappingMention(_) => (StatusCode::CONFLICT, "OverlappingMention", None),
            E::UnknownCategory(_) => (StatusCode::UNPROCESSABLE_ENTITY, "UnknownCategory", Some("category")),
            E::UnknownEntity(_) => (StatusCode::NOT_FOUND, "UnknownEntity", None),
            E::UnknownMention(_) => (StatusCode::NOT_FOUND, "UnknownMention", None),
            E::SelfMerge(_) => (StatusCode::UNPROCESSABLE_ENTITY, "SelfMerge", None),
            E::CategoryMismatch { .. } => (StatusCode::UNPROCESSABLE_ENTITY, "CategoryMismatch", None),
            E::EntityTrashed(_) => (StatusCode::CONFLICT, "EntityTrashed", None),
            E::AlreadyInLocation { .. } => (StatusCode::CONFLICT, "AlreadyInLocation", Some("location")),
            E::NotLinked(_) => (StatusCode::CONFLICT, "NotLinked", None),
            E::InvalidQid(_) => (StatusCode::UNPROCESSABLE_ENTITY, "InvalidQid", Some("qid")),
            E::InvalidConfig(_) => (StatusCode::BAD_REQUEST, "InvalidConfig", None),
        };
        let mut err = ApiError::new(status, code, e.to_string());
        err.field = field.map(str::to_string);
        err
    }
}

impl From<ParseError> for ApiError {
    fn from(e: ParseError) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ParseError", e.to_string()).with_field("content")
    }
}

impl From<ImportError> for ApiError {
    fn from(e: ImportError) -> Self {
        match e {
            ImportError::Schema(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ImportError", e.to_string()),
            ImportError::UnknownCategory(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "UnknownCategory", e.to_string()).with_field("category")
            }
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::UnknownDocument(_) => ApiError::new(StatusCode::NOT_FOUND, "UnknownDocument", message),
            StoreError::DuplicateDocument(_) => {
                ApiError::new(StatusCode::CONFLICT, "DuplicateDocument", message).with_field("doc_id")
            }
            StoreError::Conflict { .. } => {
                ApiError::new(StatusCode::CONFLICT, "ConflictError", message).with_field("base_revision")
            }
            StoreError::Validation(v) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "ValidationError", message).with_field(v.field)
            }
            StoreError::InvalidDocument(_) => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidDocument", message),
            StoreError::Storage(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "StorageError", message),
        }
    }
}

impl From<AuthError> for ApiError {
    fn from(e: AuthError) -> Self {
        let message = e.to_string();
        match e {
            AuthError::InvalidCredentials => ApiError::new(StatusCode::UNAUTHORIZED, "InvalidCredentials", message),
            AuthError::TokenExpired => ApiError::new(StatusCode::UNAUTHORIZED, "TokenExpired", message),
            AuthError::InvalidToken => ApiError::new(StatusCode::UNAUTHORIZED, "Unauthorized", message),
            AuthError::DuplicateUser(_) => {
                ApiError::new(StatusCode::CONFLICT, "DuplicateUser", message).with_field("username")
            }
            AuthError::InvalidUsername(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidUsername", message).with_field("username")
            }
            AuthError::WeakPassword(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "WeakPassword", message).with_field("new_password")
            }
            AuthError::Storage(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "StorageError", message),
        }
    }
}

impl From<ReconcileError> for ApiError {
    fn from(e: ReconcileError) -> Self {
        let message = e.to_string();
        match e {
            ReconcileError::InvalidLabel => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidLabel", message).with_field("label")
            }
            ReconcileError::InvalidQid(_) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidQid", message).with_field("qid")
            }
            ReconcileError::NotFound(_) => ApiError::new(StatusCode::NOT_FOUND, "NotFound", message),
            ReconcileError::Unavailable(_) => {
                ApiError::new(StatusCode::BAD_GATEWAY, "ReconciliationUnavailable", message)
            }
            ReconcileError::Annotation(a) => a.into(),
        }
    }
}
