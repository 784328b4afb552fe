use std::path::PathBuf;

/// Failures of the file formats and the command-line front end.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("dimension mismatch: expected {expected} nodes, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("checksum mismatch for {0}")]
    ChecksumMismatch(PathBuf),
    #[error("format mismatch: expected {expected}, file is {found}")]
    FormatMismatch { expected: &'static str, found: &'static str },
    #[error("bad value on line {line}: {message}")]
    BadValue { line: usize, message: String },
    #[error("non-finite value at node {0}")]
    NonFinite(usize),
    #[error("sidecar: {0}")]
    Sidecar(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] lissajous_core::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
