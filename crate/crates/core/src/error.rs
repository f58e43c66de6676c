use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("label column {0} not found")]
    MissingLabelColumn(String),

    #[error("dimensionality mismatch: expected {expected} features, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("split of {n} examples with test fraction {test_fraction} leaves a partition empty")]
    InvalidSplit { n: usize, test_fraction: f64 },

    #[error("requested {requested} neighbors but only {available} are available")]
    NeighborCount { requested: usize, available: usize },

    #[error("ensemble bound kmax must be odd and >= 1, got {0}")]
    EvenKmax(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("run {run} (seed {seed}): {source}")]
    Run {
        run: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by the caller's configuration rather than by
    /// the data being processed.
    pub fn is_config(&self) -> bool {
        match self {
            Error::InvalidConfig(_) => true,
            Error::Run { source, .. } => source.is_config(),
            _ => false,
        }
    }
}
