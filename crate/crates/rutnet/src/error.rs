use std::io;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] rutnet_core::Error),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("header mismatch: expected `{expected}`, found `{found}`")]
    HeaderMismatch { expected: String, found: String },
    #[error("line {line}: {message}")]
    MalformedRow { line: u64, message: String },
    #[error("curve {0} has duplicate pass values")]
    NonmonotonicCurve(String),
    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("model file schema: {0}")]
    Schema(String),
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::Core(e) => e.code(),
            Error::Io(_) => "Io",
            Error::HeaderMismatch { .. } => "HeaderMismatch",
            Error::MalformedRow { .. } => "MalformedRow",
            Error::NonmonotonicCurve(_) => "NonmonotonicCurve",
            Error::VersionMismatch { .. } => "VersionMismatch",
            Error::Schema(_) => "SchemaError",
            Error::Usage(_) => "UsageError",
        }
    }
}
