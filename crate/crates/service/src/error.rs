use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use policygen_core::engine::EngineError;
use policygen_core::evaluation::EvalError;
use policygen_core::generator::GenerateError;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::store::StoreError;

/// Machine-readable error codes. Each maps to one HTTP status.
pub const ERROR_CODES: &[(&str, u16)] = &[
    ("invalid_json", 400),
    ("unknown_format", 400),
    ("not_found", 404),
    ("unknown_question", 404),
    ("out_of_order", 409),
    ("session_completed", 409),
    ("not_answered", 409),
    ("incomplete", 409),
    ("bank_mismatch", 409),
    ("invalid_answer", 422),
    ("unresolved_placeholder", 422),
    ("invalid_input", 422),
    ("corrupt_snapshot", 500),
    ("storage_error", 500),
    ("internal", 500),
];

/// Body of every error response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ApiError {
    pub code: String,
    pub message: String,
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub detail: Value,
}

impl ApiError {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        debug_assert!(ERROR_CODES.iter().any(|(c, _)| *c == code), "unregistered code {code}");
        Self {
            code: code.to_string(),
            message: message.into(),
            detail: Value::Null,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = detail;
        self
    }

    pub fn status(&self) -> StatusCode {
        let code = ERROR_CODES
            .iter()
            .find(|(c, _)| *c == self.code)
            .map_or(500, |(_, s)| *s);
        StatusCode::from_u16(code).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR)
    }

    pub fn not_found(what: impl Into<String>) -> Self {
        Self::new("not_found", what)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status(), Json(self)).into_response()
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let message = e.to_string();
        match e {
            EngineError::UnknownQuestion(q) => Self::new("unknown_question", message).with_detail(json!({"qnum": q})),
            EngineError::ShapeMismatch {
                ref qnum,
                expected,
                found,
            } => Self::new("invalid_answer", message)
                .with_detail(json!({"qnum": qnum, "expected": expected.as_str(), "found": found})),
            EngineError::EmptyText(q) | EngineError::EmptySelection(q) | EngineError::PlaceholderInAnswer(q) => {
                Self::new("invalid_answer", message).with_detail(json!({"qnum": q}))
            }
            EngineError::OptionNotOffered { qnum, option } => {
                Self::new("invalid_answer", message).with_detail(json!({"qnum": qnum, "option": option}))
            }
            EngineError::SessionCompleted => Self::new("session_completed", message),
            EngineError::NotAnswered(q) => Self::new("not_answered", message).with_detail(json!({"qnum": q})),
            EngineError::OutOfOrder { expected, found } => {
                Self::new("out_of_order", message).with_detail(json!({"expected": expected, "found": found}))
            }
            EngineError::BankMismatch { .. } => Self::new("bank_mismatch", message),
            EngineError::CorruptSession(_) => Self::new("corrupt_snapshot", message),
            EngineError::Schema(_) | EngineError::InvalidBank(_) => Self::new("internal", message),
        }
    }
}

impl From<GenerateError> for ApiError {
    fn from(e: GenerateError) -> Self {
        let message = e.to_string();
        match e {
            GenerateError::Incomplete(at) => Self::new("incomplete", message).with_detail(json!({"cursor": at})),
            GenerateError::Unresolved(names) => {
                Self::new("unresolved_placeholder", message).with_detail(json!({"placeholders": names}))
            }
            GenerateError::UnknownFormat(_) => Self::new("unknown_format", message),
            _ => Self::new("internal", message),
        }
    }
}

impl From<EvalError> for ApiError {
    fn from(e: EvalError) -> Self {
        Self::new("invalid_input", e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        let message = e.to_string();
        match e {
            StoreError::NotFound(id) => Self::not_found(message).with_detail(json!({"id": id})),
            StoreError::Corrupt { id, .. } => Self::new("corrupt_snapshot", message).with_detail(json!({"id": id})),
            StoreError::BankMismatch { id, .. } => Self::new("bank_mismatch", message).with_detail(json!({"id": id})),
            StoreError::Io { .. } => Self::new("storage_error", message),
        }
    }
}
