use std::fmt;

use thiserror::Error;

/// A single problem found while validating a domain schema document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemaIssue {
    /// Offending parameter, or `None` for schema-level problems.
    pub parameter: Option<String>,
    pub reason: String,
}

impl SchemaIssue {
    pub fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            parameter: Some(name.into()),
            reason: reason.into(),
        }
    }

    pub fn global(reason: impl Into<String>) -> Self {
        Self {
            parameter: None,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for SchemaIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.parameter {
            Some(p) => write!(f, "parameter `{p}`: {}", self.reason),
            None => write!(f, "{}", self.reason),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid schema: {}", join_issues(.0))]
    Schema(Vec<SchemaIssue>),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("sequencing error: {0}")]
    Sequencing(String),

    #[error("access denied: {0}")]
    Access(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("incomplete typical representation for `{solution}`: no value for {missing:?}")]
    Incomplete {
        solution: String,
        missing: Vec<String>,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("storage error: {0}")]
    Storage(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

fn join_issues(issues: &[SchemaIssue]) -> String {
    issues
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    pub fn schema(parameter: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Schema(vec![SchemaIssue::param(parameter, reason)])
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn sequencing(msg: impl Into<String>) -> Self {
        Error::Sequencing(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
