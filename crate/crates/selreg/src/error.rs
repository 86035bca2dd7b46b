//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation needed more rows than the input provides.
    #[error("need at least {required} rows, got {got}")]
    InsufficientRows { got: usize, required: usize },

    /// Incompatible matrix/vector dimensions.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A matrix expected to be symmetric exceeds the symmetry tolerance.
    #[error("matrix is not symmetric: |a[{row},{col}] - a[{col},{row}]| = {delta:.3e}")]
    NotSymmetric { row: usize, col: usize, delta: f64 },

    /// An iterative routine hit its iteration cap before converging.
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },

    /// The design matrix has (numerically) dependent columns.
    #[error("rank-deficient design matrix (pivot {column} is negligible)")]
    RankDeficient { column: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    /// Malformed header: missing target column, duplicate names, etc.
    #[error("schema error: {0}")]
    Schema(String),

    /// A CSV cell failed to parse as a finite number.
    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    /// A train/test split would leave one side empty.
    #[error("split error: {0}")]
    Split(String),

    /// Invalid fold count for the given sample count.
    #[error("fold error: {0}")]
    Fold(String),

    /// The target vector is constant where variation is required.
    #[error("degenerate target: {0}")]
    DegenerateTarget(String),

    /// Too few samples for the requested discretization.
    #[error("insufficient samples: need at least {required}, got {got}")]
    InsufficientSamples { got: usize, required: usize },

    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    Param(String),

    /// An ensemble combination rule cannot apply to the given members.
    #[error("ensemble strategy error: {0}")]
    Strategy(String),

    /// A report was requested for an empty result set.
    #[error("cannot render an empty report")]
    EmptyReport,

    /// Chart inputs are empty or not finite/non-negative.
    #[error("chart error: {0}")]
    Chart(String),

    /// Experiment configuration failed validation.
    #[error("config error: {0}")]
    Config(String),
}
