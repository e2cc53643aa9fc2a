//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry at ({row}, {col})")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("zero-norm embedding at index {0}")]
    ZeroNormEmbedding(usize),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("instance count mismatch: expected {expected}, got {actual}")]
    CountMismatch { expected: usize, actual: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("track id {id} missing from frame {frame}")]
    MissingIdentity { frame: u64, id: u32 },

    #[error("both classes must be present for AUC-ROC")]
    SingleClass,

    #[error("no ground-truth instances")]
    NoGroundTruth,

    #[error("could not place {0} pigs without full overlap")]
    PlacementFailed(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unsupported sequence format version: {0}")]
    VersionMismatch(String),

    #[error("malformed RLE at line {line}: run lengths sum to {actual}, expected {expected}")]
    MalformedRle {
        line: usize,
        expected: usize,
        actual: usize,
    },

    #[error("embedding dimension mismatch at line {line}: expected {expected}, got {actual}")]
    EmbeddingDim {
        line: usize,
        expected: usize,
        actual: usize,
    },

    #[error("unknown configuration key: {0}")]
    UnknownKey(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
