//! Calibration measures: negative log likelihood, expected calibration
//! error with its reliability bins, and plain accuracy.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::softmax::{predict, ConfidenceMatrix};

/// Probabilities below this are clamped before taking logs so that an
/// underflowed confidence cannot turn the loss infinite.
pub const PROB_FLOOR: f64 = 1e-300;

/// Negative log likelihood of the true labels under a confidence matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NllSummary {
    /// Sum over samples of -log p\[label\], accumulated in ascending sample order.
    pub sum: f64,
    /// `sum / n_samples`; the value reports quote.
    pub mean: f64,
    /// How many true-label probabilities hit the clamp floor.
    pub clamped: usize,
}

/// Per-bin statistics backing a reliability diagram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliabilityBin {
    pub index: usize,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// Mean predicted-class confidence of the samples in the bin (0 when empty).
    pub mean_confidence: f64,
    /// Fraction of the bin's samples whose prediction is correct (0 when empty).
    pub accuracy: f64,
}

fn validate_labels(probs: &ConfidenceMatrix, labels: &[usize]) -> Result<()> {
    if labels.len() != probs.n_samples() {
        return Err(Error::LabelCountMismatch {
            labels: labels.len(),
            samples: probs.n_samples(),
        });
    }
    for (row, &label) in labels.iter().enumerate() {
        if label >= probs.n_classes() {
            return Err(Error::LabelOutOfRange {
                row,
                label,
                n_classes: probs.n_classes(),
            });
        }
    }
    Ok(())
}

/// Sum and mean of `-log p[label]` over all samples.
///
/// True-label probabilities below [`PROB_FLOOR`] are clamped and counted in
/// `clamped` so downstream reports can flag them.
pub fn nll(probs: &ConfidenceMatrix, labels: &[usize]) -> Result<NllSummary> {
    validate_labels(probs, labels)?;
    let mut sum = 0.0;
    let mut clamped = 0;
    for (row, &label) in probs.rows().zip(labels) {
        let mut p = row[label];
        if p < PROB_FLOOR {
            p = PROB_FLOOR;
            clamped += 1;
        }
        sum -= p.ln();
    }
    Ok(NllSummary {
        sum,
        mean: sum / probs.n_samples() as f64,
        clamped,
    })
}

/// Expected calibration error plus the full bin table.
///
/// A sample's confidence is its predicted-class probability; it lands in bin
/// `floor(confidence * n_bins)`, clamped so a confidence of exactly 1 falls
/// in the last bin. Empty bins contribute nothing to the error.
pub fn ece(
    probs: &ConfidenceMatrix,
    labels: &[usize],
    n_bins: usize,
) -> Result<(f64, Vec<ReliabilityBin>)> {
    if n_bins == 0 {
        return Err(Error::InvalidConfig {
            reason: "ece needs at least one bin".into(),
        });
    }
    validate_labels(probs, labels)?;

    let mut counts = vec![0usize; n_bins];
    let mut conf_sums = vec![0.0f64; n_bins];
    let mut correct = vec![0usize; n_bins];
    for (pred, &label) in predict(probs).iter().zip(labels) {
        let bin = ((pred.confidence * n_bins as f64).floor() as usize).min(n_bins - 1);
        counts[bin] += 1;
        conf_sums[bin] += pred.confidence;
        if pred.predicted_class == label {
            correct[bin] += 1;
        }
    }

    let n = probs.n_samples() as f64;
    let mut fraction = 0.0;
    let mut bins = Vec::with_capacity(n_bins);
    for l in 0..n_bins {
        let (mean_confidence, accuracy) = if counts[l] > 0 {
            let c = counts[l] as f64;
            (conf_sums[l] / c, correct[l] as f64 / c)
        } else {
            (0.0, 0.0)
        };
        if counts[l] > 0 {
            fraction += counts[l] as f64 / n * (accuracy - mean_confidence).abs();
        }
        bins.push(ReliabilityBin {
            index: l,
            lower: l as f64 / n_bins as f64,
            upper: (l + 1) as f64 / n_bins as f64,
            count: counts[l],
            mean_confidence,
            accuracy,
        });
    }
    Ok((fraction, bins))
}

/// Fraction of samples whose argmax prediction matches the label.
pub fn accuracy(probs: &ConfidenceMatrix, labels: &[usize]) -> Result<f64> {
    validate_labels(probs, labels)?;
    let hits = predict(probs)
        .iter()
        .zip(labels)
        .filter(|(pred, &label)| pred.predicted_class == label)
        .count();
    Ok(hits as f64 / probs.n_samples() as f64)
}
