//! Logit matrices and their validation.

use crate::error::{Error, Result};

/// An N x K matrix of raw pre-softmax scores, with an optional label vector.
///
/// Every entry is validated to be finite at construction, labels (when
/// present) are validated to lie in `[0, n_classes)`, and the shape must
/// satisfy N >= 1 and K >= 2. All downstream operations rely on these
/// invariants and never re-check them.
#[derive(Debug, Clone, PartialEq)]
pub struct LogitDataset {
    logits: Vec<f64>,
    n_samples: usize,
    n_classes: usize,
    labels: Option<Vec<usize>>,
}

impl LogitDataset {
    /// Build a dataset from row vectors. All rows must have the same length.
    pub fn from_rows(rows: Vec<Vec<f64>>, labels: Option<Vec<usize>>) -> Result<Self> {
        let n_samples = rows.len();
        if n_samples == 0 {
            return Err(Error::InvalidShape {
                reason: "need at least one sample".into(),
            });
        }
        let n_classes = rows[0].len();
        let mut logits = Vec::with_capacity(n_samples * n_classes);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n_classes {
                return Err(Error::InvalidShape {
                    reason: format!("row {i} has {} columns, expected {n_classes}", row.len()),
                });
            }
            logits.extend_from_slice(row);
        }
        Self::new(logits, n_samples, n_classes, labels)
    }

    /// Build a dataset from a flat row-major buffer of length `n_samples * n_classes`.
    pub fn new(
        logits: Vec<f64>,
        n_samples: usize,
        n_classes: usize,
        labels: Option<Vec<usize>>,
    ) -> Result<Self> {
        if n_samples == 0 {
            return Err(Error::InvalidShape {
                reason: "need at least one sample".into(),
            });
        }
        if n_classes < 2 {
            return Err(Error::InvalidShape {
                reason: format!("need at least two classes, got {n_classes}"),
            });
        }
        if logits.len() != n_samples * n_classes {
            return Err(Error::InvalidShape {
                reason: format!(
                    "buffer holds {} values, expected {n_samples} x {n_classes}",
                    logits.len()
                ),
            });
        }
        for (idx, &v) in logits.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFiniteLogit {
                    row: idx / n_classes,
                    col: idx % n_classes,
                    value: v,
                });
            }
        }
        if let Some(ref labels) = labels {
            if labels.len() != n_samples {
                return Err(Error::LabelCountMismatch {
                    labels: labels.len(),
                    samples: n_samples,
                });
            }
            for (row, &label) in labels.iter().enumerate() {
                if label >= n_classes {
                    return Err(Error::LabelOutOfRange {
                        row,
                        label,
                        n_classes,
                    });
                }
            }
        }
        Ok(Self {
            logits,
            n_samples,
            n_classes,
            labels,
        })
    }

    pub fn n_samples(&self) -> usize {
        self.n_samples
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    /// The logit row for sample `i`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.logits[i * self.n_classes..(i + 1) * self.n_classes]
    }

    pub fn labels(&self) -> Option<&[usize]> {
        self.labels.as_deref()
    }

    /// Labels, or an error when the dataset carries none.
    pub fn require_labels(&self) -> Result<&[usize]> {
        self.labels.as_deref().ok_or(Error::MissingLabels)
    }

    /// The same logits with the label vector removed.
    pub fn without_labels(&self) -> Self {
        Self {
            logits: self.logits.clone(),
            n_samples: self.n_samples,
            n_classes: self.n_classes,
            labels: None,
        }
    }

    /// A new dataset holding the given sample indices, in the order given.
    /// Label presence is preserved. Indices must be in range.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut logits = Vec::with_capacity(indices.len() * self.n_classes);
        for &i in indices {
            logits.extend_from_slice(self.row(i));
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i]).collect());
        Self::new(logits, indices.len(), self.n_classes, labels)
    }

    /// Iterator over logit rows in ascending sample order.
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.logits.chunks_exact(self.n_classes)
    }
}
