use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by kernel construction, shrinkage estimation, training and
/// the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("centering needs at least 2 observations, got {0}")]
    CenteringTooSmall(usize),

    #[error("kernel matrix is not centered (max row sum {0:e})")]
    NotCentered(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("insufficient observations for unbiased variance estimator: need n >= 3, got {0}")]
    InsufficientObservations(usize),

    #[error("feature dimension cannot be resolved: {0}")]
    UnresolvedFeatureDim(String),

    #[error("shrinkage coefficient {0} outside [0, 1]")]
    LambdaOutOfRange(f64),

    #[error("eigenvalue relation requires n < p, got n = {n}, p = {p}")]
    NotSmallSample { n: usize, p: usize },

    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("within-class scatter is singular under {regularizer}")]
    SingularScatter { regularizer: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trial failed (n_g = {n_g}, repetition = {repetition}, seed = {seed}): {source}")]
    Trial {
        n_g: usize,
        repetition: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
