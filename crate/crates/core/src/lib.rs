//! Post-hoc confidence calibration for classifiers.
//!
//! Everything starts from a matrix of raw logits. The crate measures how
//! well the implied softmax confidences are calibrated (NLL, expected
//! calibration error, reliability bins), fits a single scaling temperature
//! either from labels or without them, and applies a temperature to produce
//! calibrated confidences. A seeded synthetic generator with a known
//! ground-truth temperature backs the test suite.

pub mod dataset;
pub mod error;
pub mod io;
pub mod metrics;
pub mod optimize;
pub mod report;
pub mod softmax;
pub mod synth;
pub mod ts;
pub mod uts;

pub use dataset::LogitDataset;
pub use error::{Error, Result};
pub use metrics::{accuracy, ece, nll, NllSummary, ReliabilityBin};
pub use optimize::{minimize_scalar, MinimizeOutcome, OptimizerConfig};
pub use report::{
    evaluate, CalibrationReport, FitReport, TemperatureSummary, UtsAudit, REPORT_SCHEMA,
};
pub use softmax::{
    predict, tempered_softmax, ConfidenceMatrix, FitMethod, Prediction, Temperature,
};
pub use synth::{generate, SynthConfig};
pub use ts::{fit_ts, TsFit};
pub use uts::{build_subsets, compute_thresholds, fit_uts, uts_loss, ClassSubsets, UtsFit};
