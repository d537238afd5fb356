use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("parallel files differ in length: first differing line is {line}")]
    LineCountMismatch { line: usize },

    #[error("{}:{line}: malformed alignment link `{token}` (expected `uint-uint`)", file.display())]
    MalformedLink {
        file: PathBuf,
        line: usize,
        token: String,
    },

    #[error("{}:{line}: alignment link `{token}` out of range (source length {src_len}, target length {tgt_len})", file.display())]
    LinkOutOfRange {
        file: PathBuf,
        line: usize,
        token: String,
        src_len: usize,
        tgt_len: usize,
    },

    #[error("{}:{line}: {message}", file.display())]
    Parse {
        file: PathBuf,
        line: usize,
        message: String,
    },

    #[error("test set contains no running words")]
    EmptyTestSet,

    #[error("invalid class count {classes} for a vocabulary of {vocab_size} words")]
    InvalidClassCount { classes: usize, vocab_size: usize },

    #[error("word `{word}` has conflicting labels `{first}` and `{second}`")]
    ConflictingLabel {
        word: String,
        first: String,
        second: String,
    },

    #[error("reference sentence is empty")]
    EmptyReference,

    #[error("empty hypothesis corpus")]
    EmptyCorpus,

    #[error("length mismatch: {what} ({left} vs {right})")]
    LengthMismatch {
        what: &'static str,
        left: usize,
        right: usize,
    },

    #[error("top-k size {k} exceeds corpus size {size}")]
    TopKTooLarge { k: usize, size: usize },

    #[error("invalid feature value {value} for `{feature}` on pair `{src} ||| {tgt}`")]
    InvalidFeature {
        feature: &'static str,
        value: f64,
        src: String,
        tgt: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
