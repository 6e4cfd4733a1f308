use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApiError {
    #[error("no strategy registered as `{0}`")]
    UnknownStrategy(String),
    #[error("{0}")]
    Incompatible(String),
    #[error("no session `{0}`")]
    UnknownSession(String),
    #[error("{message}")]
    IllegalMove { reason: &'static str, message: String },
    #[error("the game is over")]
    SessionFinished,
    #[error("{0}")]
    InvalidRequest(String),
}

/// Wire form of every error response.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErrorBody {
    pub code: &'static str,
    pub message: String,
    pub detail: serde_json::Value,
}

impl ApiError {
    pub fn code(&self) -> &'static str {
        match self {
            ApiError::UnknownStrategy(_) => "unknown-strategy",
            ApiError::Incompatible(_) => "incompatible-config",
            ApiError::UnknownSession(_) => "unknown-session",
            ApiError::IllegalMove { .. } => "illegal-move",
            ApiError::SessionFinished => "session-finished",
            ApiError::InvalidRequest(_) => "invalid-request",
        }
    }

    pub fn status(&self) -> StatusCode {
        match self {
            ApiError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ApiError::IllegalMove { .. } | ApiError::SessionFinished => StatusCode::CONFLICT,
            ApiError::UnknownStrategy(_) | ApiError::Incompatible(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::InvalidRequest(_) => StatusCode::BAD_REQUEST,
        }
    }

    pub fn body(&self) -> ErrorBody {
        let detail = match self {
            ApiError::IllegalMove { reason, .. } => serde_json::json!({ "reason": reason }),
            ApiError::UnknownStrategy(id) => serde_json::json!({ "strategy": id }),
            ApiError::UnknownSession(id) => serde_json::json!({ "session": id }),
            _ => serde_json::Value::Null,
        };
        ErrorBody {
            code: self.code(),
            message: self.to_string(),
            detail,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self.body())).into_response()
    }
}
