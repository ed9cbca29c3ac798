use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema error in `{field}`: {reason}")]
    Schema { field: String, reason: String },
    #[error("shape error in {object}: expected {expected}, got {actual}")]
    Shape {
        object: String,
        expected: String,
        actual: String,
    },
    #[error("weight {index} is {weight}; weights must be strictly positive")]
    NonPositiveWeight { index: usize, weight: f64 },
    #[error("unknown profile `{0}` (expected one of: {profiles})", profiles = crate::generate::PROFILES.join(", "))]
    UnknownProfile(String),
    #[error("unknown suite `{0}` (expected `all` or one of: {suites})", suites = crate::suite::SUITES.join(", "))]
    UnknownSuite(String),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] ckg_core::Error),
}

impl CliError {
    pub(crate) fn schema(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Schema {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn shape(object: impl Into<String>, expected: impl ToString, actual: impl ToString) -> Self {
        CliError::Shape {
            object: object.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
