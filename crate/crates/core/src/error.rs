use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("series term overflow in delay epoch {epoch}")]
    Overflow { epoch: usize },

    #[error("history index {index} not yet available (filled up to {filled})")]
    OutOfRange { index: usize, filled: usize },

    #[error("mesh mismatch: {0}")]
    MeshMismatch(String),

    #[error("config error: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}
