//! Error type shared by every module of the crate.

use std::path::PathBuf;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A logit entry is NaN or infinite.
    #[error("logit at row {row}, column {col} is not finite ({value})")]
    NonFiniteLogit { row: usize, col: usize, value: f64 },

    /// A label falls outside `[0, n_classes)`.
    #[error("label {label} at row {row} is outside [0, {n_classes})")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        n_classes: usize,
    },

    /// Label vector length differs from the number of samples.
    #[error("label count {labels} does not match sample count {samples}")]
    LabelCountMismatch { labels: usize, samples: usize },

    /// Dataset shape violates an invariant (N >= 1, K >= 2, ...).
    #[error("invalid dataset shape: {reason}")]
    InvalidShape { reason: String },

    /// Temperature must be strictly positive and finite.
    #[error("temperature must be finite and > 0, got {0}")]
    NonPositiveTemperature(f64),

    /// An operation that needs labels was given an unlabelled dataset.
    #[error("operation requires labels but the dataset has none")]
    MissingLabels,

    /// Calibration fraction must lie strictly inside (0, 1).
    #[error("calibration fraction must lie in (0, 1), got {0}")]
    InvalidFraction(f64),

    /// Bin count or optimizer configuration out of range.
    #[error("invalid configuration: {reason}")]
    InvalidConfig { reason: String },

    /// CSV cell failed to parse or a row had the wrong arity.
    #[error("parse error at line {line}{}: {message}", column.map(|c| format!(", column {c}")).unwrap_or_default())]
    Parse {
        line: usize,
        column: Option<usize>,
        message: String,
    },

    /// File I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The objective was non-finite on more than half of the search grid.
    #[error("objective is non-finite on {}/{grid_points} grid points (first offenders: {})",
            offending.len(),
            offending.iter().take(5).map(|t| format!("{t:.6}")).collect::<Vec<_>>().join(", "))]
    ObjectiveNonFinite {
        grid_points: usize,
        offending: Vec<f64>,
    },

    /// Every per-class subset came out empty; the loss has no terms.
    #[error("every class subset is empty; nothing to fit")]
    NoUsableSubsets,

    /// Report serialization failure.
    #[error("failed to serialize report: {0}")]
    Serialize(#[from] serde_json::Error),
}
