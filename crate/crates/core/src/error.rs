//! Error type shared by every module of the crate.

use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Two series (or a series and an envelope) that must align have different lengths.
    #[error("incompatible series lengths: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("time series must contain at least one sample")]
    EmptySeries,

    #[error("non-finite sample {value} at index {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("dataset must contain at least one series")]
    EmptyDataset,

    #[error("label count {labels} does not match series count {series}")]
    LabelCount { labels: usize, series: usize },

    #[error("invalid warping window: {0}")]
    InvalidWindow(String),

    #[error("series of length {length} is too long for exhaustive path enumeration (max {max})")]
    SeriesTooLong { length: usize, max: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("requested {k} clusters but the dataset has only {n} series")]
    TooManyClusters { k: usize, n: usize },

    #[error("partitions must cover at least two items, got {0}")]
    TooFewItems(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("{path}: row {row}: {message}")]
    Parse {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("unsupported dataset {name}: {reason}")]
    UnsupportedDataset { name: String, reason: String },

    #[error("savitzky-golay filter: {0}")]
    Filter(String),

    #[error("I/O error on {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
