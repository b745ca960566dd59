use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("corpus directory not found: {0}")]
    MissingDirectory(PathBuf),

    #[error("empty corpus: no .txt documents in {0}")]
    EmptyCorpus(PathBuf),

    #[error("file is not valid UTF-8: {0}")]
    NotUtf8(PathBuf),

    #[error("empty vocabulary: no word reaches min_freq {min_freq}")]
    EmptyVocabulary { min_freq: usize },

    #[error("zero-norm row for word '{0}'")]
    ZeroNormRow(String),

    #[error("zero vector")]
    ZeroVector,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("SVD did not converge")]
    SvdNonConvergence,

    #[error("domain '{domain}' shares only {shared} word(s) with the target space")]
    InsufficientOverlap { domain: String, shared: usize },

    #[error("'{0}' has embeddings in fewer than 2 spaces (insufficient domains)")]
    InsufficientDomains(String),

    #[error("need at least 2 domains, got {0}")]
    TooFewDomains(usize),

    #[error("no target words")]
    NoTargetWords,

    #[error("word not found: '{0}'")]
    UnknownWord(String),

    #[error("zero context center for '{word}' in domain '{domain}'{hint}")]
    ZeroCenter {
        word: String,
        domain: String,
        hint: &'static str,
    },

    #[error("rankings share no words")]
    EmptyIntersection,

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("parse error in {context}: {message}")]
    Parse { context: String, message: String },

    #[error("domain '{domain}': {source}")]
    Domain {
        domain: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    pub(crate) fn in_domain(self, domain: &str) -> Self {
        Error::Domain {
            domain: domain.to_string(),
            source: Box::new(self),
        }
    }
}
