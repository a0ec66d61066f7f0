use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Config(String),
    #[error("text is empty")]
    EmptyText,
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("no language profiles loaded")]
    NoProfiles,
    #[error("minhash parameters differ between signatures")]
    ParamsMismatch,
    #[error("unknown token id {0}")]
    UnknownToken(u32),
    #[error("incompatible vocabulary: {0}")]
    IncompatibleVocab(String),
    #[error("vocabulary fingerprint mismatch: dataset {expected}, vocabulary {found}")]
    FingerprintMismatch { expected: String, found: String },
    #[error("corrupt data: {0}")]
    Corrupt(String),
    #[error("invalid url {url}: {reason}")]
    Url { url: String, reason: String },
    #[error("template error: {0}")]
    Template(String),
    #[error("invalid utf-8 in decoded tokens")]
    InvalidUtf8,
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// True for errors caused by bad user configuration rather than the
    /// environment; the CLI maps these to a distinct exit code.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Template(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
