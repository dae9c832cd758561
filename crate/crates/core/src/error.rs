use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit exceeded: {what} needs {needed} qubits, limit is {limit}")]
    Resource {
        what: &'static str,
        needed: usize,
        limit: usize,
    },

    #[error("validation failed: {message} (max deviation {deviation:.3e}, tolerance {tolerance:.1e})")]
    Validation {
        message: String,
        deviation: f64,
        tolerance: f64,
    },

    #[error("not available: {0}")]
    NotAvailable(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid weave file {path}: {message}")]
    WeaveFormat { path: PathBuf, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
