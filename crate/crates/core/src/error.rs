use std::io;

use thiserror::Error;

use crate::corpus::TermId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate term id {0} in one document")]
    DuplicateTerm(TermId),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("term id {term} is outside the dictionary of size {dims}")]
    TermOutOfRange { term: TermId, dims: usize },

    #[error("term {0} occurs in no document of the collection")]
    ZeroDocumentFrequency(TermId),

    #[error("term {0} occurs in no class of the collection")]
    ZeroClassFrequency(TermId),

    #[error("weighting scheme uses icf but no class statistics were supplied")]
    MissingClassStats,

    #[error("average document length is zero; BM25 is undefined")]
    ZeroAverageLength,

    #[error("invalid BM25 parameters a={a}, b={b} (need a > 0 and 0 <= b <= 1)")]
    InvalidBm25Params { a: f64, b: f64 },

    #[error("unknown measure `{0}`")]
    UnknownMeasure(String),

    #[error("unknown weighting scheme `{0}`")]
    UnknownWeighting(String),

    #[error("weighting `{weighting}` cannot be combined with measure `{measure}`")]
    IllegalCombination { measure: String, weighting: String },

    #[error("k must be at least 1")]
    InvalidK,

    #[error("precision depth {k} exceeds ranked list length {len}")]
    DepthExceedsList { k: usize, len: usize },

    #[error("collection view is empty")]
    EmptyCollection,

    #[error("cross validation needs at least 2 folds, got {0}")]
    TooFewFolds(usize),

    #[error("fold {0} contains no documents")]
    EmptyFold(usize),

    #[error("document index {index} is out of range for a corpus of {len} documents")]
    DocumentOutOfRange { index: usize, len: usize },

    #[error("index file: {0}")]
    IndexFormat(String),

    #[error("index file version {found} is not supported (expected {expected})")]
    IndexVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] io::Error),
}
