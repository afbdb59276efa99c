use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point cloud must contain at least one point of dimension at least one")]
    EmptyCloud,

    #[error("non-finite coordinate at point {point}, axis {axis}")]
    NonFinite { point: usize, axis: usize },

    #[error("coordinate buffer of length {len} is not a multiple of dimension {dim}")]
    Shape { len: usize, dim: usize },

    #[error("vertex index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("simplex vertices must be 1 to 3 strictly increasing indices, got {0:?}")]
    BadSimplex(Vec<usize>),

    #[error("scale {eps} is outside the validity range of a diagram computed to threshold {threshold}")]
    OutOfValidity { eps: f64, threshold: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot compute a confidence interval from an empty value list")]
    EmptyValues,

    #[error("distribution configurations differ: {0}")]
    ConfigMismatch(String),

    #[error("comparison requires a Train distribution set")]
    MissingTrain,

    #[error("comparison requires a Test or OOD distribution set besides Train")]
    MissingCandidate,

    #[error("statistic {0} missing from distribution set")]
    MissingStatistic(String),

    #[error("{path}: malformed header: {msg}")]
    MalformedHeader { path: PathBuf, msg: String },

    #[error("{path}: line {line}: expected {expected} values, found {found}")]
    DimensionMismatch {
        path: PathBuf,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}: line {line}: non-finite value {value:?}")]
    NonFiniteValue { path: PathBuf, line: usize, value: String },

    #[error("{path}: line {line}: cannot parse {value:?} as a number")]
    ParseNumber { path: PathBuf, line: usize, value: String },

    #[error("{path}: payload holds {found} bytes, header requires {expected}")]
    Truncated { path: PathBuf, expected: u64, found: u64 },

    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },

    #[error("reading {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("writing {path}: {source}")]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("resource exhausted: {0}")]
    Resource(String),

    #[error("run cancelled")]
    Cancelled,
}

impl Error {
    /// Resource errors (allocation, output I/O, cancellation) as opposed to bad input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Write { .. } | Error::Resource(_) | Error::Cancelled)
    }
}
