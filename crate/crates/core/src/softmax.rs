//! Tempered softmax, calibrated confidence matrices, and prediction extraction.

use serde::{Deserialize, Serialize};

use crate::dataset::LogitDataset;
use crate::error::{Error, Result};

/// How a temperature value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FitMethod {
    /// Fitted on labelled data by minimizing negative log likelihood.
    Ts,
    /// Fitted without labels on per-class high-confidence subsets.
    Uts,
    /// Supplied directly, not fitted.
    Fixed,
}

impl std::fmt::Display for FitMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FitMethod::Ts => "ts",
            FitMethod::Uts => "uts",
            FitMethod::Fixed => "fixed",
        })
    }
}

/// A strictly positive scaling temperature together with fit metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Temperature {
    /// The fitted or supplied value, always finite and > 0.
    pub value: f64,
    pub method: FitMethod,
    /// Objective value at the returned temperature (0 for fixed values).
    pub loss_at_optimum: f64,
    /// Number of objective evaluations spent by the optimizer.
    pub evaluations: usize,
}

impl Temperature {
    /// Wrap a user-supplied value, validating it is finite and positive.
    pub fn fixed(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::NonPositiveTemperature(value));
        }
        Ok(Self {
            value,
            method: FitMethod::Fixed,
            loss_at_optimum: 0.0,
            evaluations: 0,
        })
    }
}

/// An N x K row-stochastic matrix of softmax outputs.
///
/// Rows sum to 1 within 1e-9. Entries produced from finite logits are
/// mathematically in (0, 1), though extreme logit gaps can underflow an
/// entry to 0.0 in 64-bit arithmetic; consumers that take logs clamp.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceMatrix {
    probs: Vec<f64>,
    n_samples: usize,
    n_classes: usize,
    temperature_used: f64,
}

/// Row-sum tolerance enforced on every confidence row.
pub const ROW_SUM_TOL: f64 = 1e-9;

impl ConfidenceMatrix {
    /// Build from row vectors, validating shape, entry range, and row sums.
    pub fn from_rows(rows: Vec<Vec<f64>>, temperature_used: f64) -> Result<Self> {
        if !temperature_used.is_finite() || temperature_used <= 0.0 {
            return Err(Error::NonPositiveTemperature(temperature_used));
        }
        let n_samples = rows.len();
        if n_samples == 0 {
            return Err(Error::InvalidShape {
                reason: "need at least one row".into(),
            });
        }
        let n_classes = rows[0].len();
        if n_classes < 2 {
            return Err(Error::InvalidShape {
                reason: format!("need at least two classes, got {n_classes}"),
            });
        }
        let mut probs = Vec::with_capacity(n_samples * n_classes);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_classes {
                return Err(Error::InvalidShape {
                    reason: format!("row {i} has {} columns, expected {n_classes}", row.len()),
                });
            }
            let mut sum = 0.0;
            for &p in row {
                if !(0.0..=1.0).contains(&p) {
                    return Err(Error::InvalidShape {
                        reason: format!("row {i} holds a probability outside [0, 1]: {p}"),
                    });
                }
                sum += p;
            }
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::InvalidShape {
                    reason: format!("row {i} sums to {sum}, not 1"),
                });
            }
            probs.extend_from_slice(row);
        }
        Ok(Self {
            probs,
            n_samples,
            n_classes,
            temperature_used,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn temperature_used(&self) -> f64 {
        self.temperature_used
    }

    /// The probability row for sample `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.probs[i * self.n_classes..(i + 1) * self.n_classes]
    }

    /// Iterator over probability rows in ascending sample order.
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.probs.chunks_exact(self.n_classes)
    }
}

/// Predicted class and its confidence for one sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    /// Argmax class, ties broken toward the lowest class index.
    pub predicted_class: usize,
    /// Probability of the predicted class (the row maximum).
    pub confidence: f64,
}

/// Softmax of `logits / temperature`, row by row.
///
/// Each row is shifted by its maximum before exponentiation so that large
/// logits cannot overflow. `temperature = 1` reproduces the plain softmax.
pub fn tempered_softmax(data: &LogitDataset, temperature: f64) -> Result<ConfidenceMatrix> {
    if !temperature.is_finite() || temperature <= 0.0 {
        return Err(Error::NonPositiveTemperature(temperature));
    }
    let k = data.n_classes();
    let mut probs = Vec::with_capacity(data.n_samples() * k);
    let mut scaled = vec![0.0f64; k];
    for row in data.rows() {
        for (z, &h) in scaled.iter_mut().zip(row) {
            *z = h / temperature;
        }
        let max = scaled.iter().fold(f64::NEG_INFINITY, |m, &z| m.max(z));
        let mut sum = 0.0;
        for z in scaled.iter_mut() {
            *z = (*z - max).exp();
            sum += *z;
        }
        for &e in scaled.iter() {
            probs.push(e / sum);
        }
    }
    Ok(ConfidenceMatrix {
        probs,
        n_samples: data.n_samples(),
        n_classes: k,
        temperature_used: temperature,
    })
}

/// Argmax class and confidence per row, ties broken toward the lowest index.
pub fn predict(probs: &ConfidenceMatrix) -> Vec<Prediction> {
    probs
        .rows()
        .map(|row| {
            let mut best = 0usize;
            for (j, &p) in row.iter().enumerate().skip(1) {
                if p > row[best] {
                    best = j;
                }
            }
            Prediction {
                predicted_class: best,
                confidence: row[best],
            }
        })
        .collect()
}
