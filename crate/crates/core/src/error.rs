use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("training corpus is empty")]
    EmptyCorpus,

    #[error("vocabulary is empty after applying min_count={0}")]
    EmptyVocabulary(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("duplicate token {0:?}")]
    DuplicateToken(String),

    #[error("zero-norm vector has no direction")]
    DegenerateVector,

    #[error("unknown title {0:?}")]
    UnknownTitle(String),

    #[error("none of the terms of topic {0:?} are in the vocabulary")]
    NoTermCoverage(String),

    #[error("topic {0:?} has no term probabilities")]
    MissingTermProbs(String),

    #[error("invalid topic {id:?}: {reason}")]
    InvalidTopic { id: String, reason: String },

    #[error("no letter trigrams: every string is shorter than 3 characters")]
    NoTrigrams,

    #[error("empty label")]
    EmptyLabel,

    #[error("link graph has no nodes")]
    EmptyGraph,

    #[error("degenerate training set: {0}")]
    DegenerateTrainingSet(String),

    #[error("model has not been fitted")]
    UnfittedModel,

    #[error("candidate {label:?} of topic {topic:?} has no feature vector")]
    MissingFeatures { topic: String, label: String },

    #[error("no gold rating for topic {topic:?}, label {label:?}")]
    MissingGold { topic: String, label: String },

    #[error("domain {domain:?} has {found} topics, fewer than the {folds} folds requested")]
    TooFewTopics {
        domain: String,
        found: usize,
        folds: usize,
    },

    #[error("training and test domains overlap: {0:?}")]
    OverlappingDomains(Vec<String>),

    #[error("empty input: {0}")]
    EmptyInput(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    /// True for errors caused by malformed or inconsistent inputs rather
    /// than by a failure while running a stage.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Io { .. })
    }
}
