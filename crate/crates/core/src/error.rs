use std::path::PathBuf;

/// Errors raised anywhere in the lab pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },

    #[error("token `{token}` is not in the source vocabulary")]
    OutOfVocabulary { token: String },

    #[error("grammar capacity exhausted: needed {needed} sentences, generated {generated} (duplication cap {cap})")]
    Capacity {
        needed: usize,
        generated: usize,
        cap: usize,
    },

    #[error("sentence {index} has {len} tokens, exceeding the batch budget of {budget}")]
    SentenceTooLong {
        index: usize,
        len: usize,
        budget: usize,
    },

    #[error("non-finite value in `{param}`")]
    Numeric { param: String },

    #[error("shape mismatch in `{param}`: expected {expected:?}, got {got:?}")]
    Shape {
        param: String,
        expected: (usize, usize),
        got: (usize, usize),
    },

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("corpus `{0}` is empty")]
    EmptyCorpus(&'static str),

    #[error("malformed snapshot: {0}")]
    Snapshot(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            field,
            reason: reason.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
