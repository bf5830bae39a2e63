//! The exported calibration report and the evaluation pipeline that fills it.

use serde::{Deserialize, Serialize};

use crate::dataset::LogitDataset;
use crate::error::Result;
use crate::metrics::{accuracy, ece, nll, ReliabilityBin};
use crate::softmax::{tempered_softmax, FitMethod, Temperature};
use crate::uts::ClassSubsets;

/// Report schema version; bumped on any breaking field change.
pub const REPORT_SCHEMA: u32 = 1;

/// The temperature fields a report carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemperatureSummary {
    pub value: f64,
    pub method: FitMethod,
}

impl From<&Temperature> for TemperatureSummary {
    fn from(t: &Temperature) -> Self {
        Self {
            value: t.value,
            method: t.method,
        }
    }
}

/// Per-class audit of an unsupervised fit: threshold, subset size, and the
/// size of the sample set the threshold was computed over.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtsAudit {
    pub thresholds: Vec<f64>,
    pub subset_sizes: Vec<usize>,
    pub complement_sizes: Vec<usize>,
}

impl From<&ClassSubsets> for UtsAudit {
    fn from(subsets: &ClassSubsets) -> Self {
        Self {
            thresholds: subsets.thresholds.clone(),
            subset_sizes: subsets.subsets.iter().map(Vec::len).collect(),
            complement_sizes: subsets.complement_sizes.clone(),
        }
    }
}

/// Outcome of a temperature fit, as written by the fitting commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub schema: u32,
    pub temperature: Temperature,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub uts_audit: Option<UtsAudit>,
}

impl FitReport {
    pub fn supervised(fit: &crate::ts::TsFit) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            temperature: fit.temperature.clone(),
            warnings: fit.warnings.clone(),
            uts_audit: None,
        }
    }

    pub fn unsupervised(fit: &crate::uts::UtsFit) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            temperature: fit.temperature.clone(),
            warnings: fit.warnings.clone(),
            uts_audit: Some(UtsAudit::from(&fit.subsets)),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Calibration quality of one dataset at one temperature.
///
/// Serialization is stable: field order is fixed and floats are written in
/// shortest round-trip form, so identical inputs produce byte-identical
/// JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub schema: u32,
    pub accuracy: f64,
    pub nll_mean: f64,
    pub nll_sum: f64,
    pub ece_fraction: f64,
    pub ece_percent: f64,
    pub n_bins: usize,
    pub temperature: TemperatureSummary,
    pub bins: Vec<ReliabilityBin>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub uts_audit: Option<UtsAudit>,
}

impl CalibrationReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Apply a temperature to a labelled dataset and measure the result.
///
/// Warnings passed in (from an earlier fit) are carried into the report;
/// NLL clamping adds its own warning.
pub fn evaluate(
    data: &LogitDataset,
    temperature: &Temperature,
    n_bins: usize,
    mut warnings: Vec<String>,
) -> Result<CalibrationReport> {
    let labels = data.require_labels()?;
    let probs = tempered_softmax(data, temperature.value)?;
    let acc = accuracy(&probs, labels)?;
    let nll_out = nll(&probs, labels)?;
    if nll_out.clamped > 0 {
        warnings.push(format!(
            "{} true-label probabilities underflowed and were clamped before the log",
            nll_out.clamped
        ));
    }
    let (ece_fraction, bins) = ece(&probs, labels, n_bins)?;

    Ok(CalibrationReport {
        schema: REPORT_SCHEMA,
        accuracy: acc,
        nll_mean: nll_out.mean,
        nll_sum: nll_out.sum,
        ece_fraction,
        ece_percent: 100.0 * ece_fraction,
        n_bins,
        temperature: TemperatureSummary::from(temperature),
        bins,
        warnings,
        uts_audit: None,
    })
}
