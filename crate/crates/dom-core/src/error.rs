//! Crate-wide error type.

use thiserror::Error;

use crate::llm::LlmRole;

#[derive(Debug, Error)]
pub enum DomError {
    #[error("parse error in {path} line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("entity not found: {0}")]
    EntityNotFound(String),

    #[error("integrity error: {0}")]
    Integrity(String),

    #[error("backend error{}: {msg}", status.map(|s| format!(" (status {s})")).unwrap_or_default())]
    Backend {
        msg: String,
        status: Option<u16>,
        retriable: bool,
    },

    #[error("script exhausted for role {role}")]
    ScriptExhausted { role: LlmRole },

    #[error("schema error for role {role}: {msg}")]
    Schema { role: LlmRole, msg: String },

    #[error("template for role {role} missing variable {var}")]
    MissingTemplateVar { role: LlmRole, var: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl DomError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        DomError::Io {
            path: path.into(),
            source,
        }
    }

    /// Backend errors that a bounded retry loop may attempt again.
    pub fn is_retriable(&self) -> bool {
        matches!(self, DomError::Backend { retriable: true, .. })
    }
}

pub type Result<T> = std::result::Result<T, DomError>;
