use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("mesh has {} wrongly oriented element(s), first is element {}", .0.len(), .0[0])]
    BadOrientation(Vec<usize>),

    #[error("expected a {expected}D mesh, got a {found}D mesh")]
    Dimension { expected: usize, found: usize },

    #[error("coordinate vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {msg}")]
    Report { path: PathBuf, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
