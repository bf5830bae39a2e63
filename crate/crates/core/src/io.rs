//! CSV interchange for logits and probabilities, plus the seeded
//! calibration/test split.
//!
//! The file format is plain comma-separated values with `.` decimals and no
//! header unless one is declared: each row holds K logits, followed by one
//! integer label column when the file is labelled. Floats are written in
//! shortest round-trip form, so write-then-read reproduces values exactly.

use std::fs;
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::LogitDataset;
use crate::error::{Error, Result};
use crate::softmax::ConfidenceMatrix;

fn io_err(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Write `contents` to `path` via a temporary file and rename, so readers
/// never observe a half-written file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, contents).map_err(|e| io_err(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

/// Read a logits CSV. `has_labels` declares a trailing integer label
/// column; `has_header` skips the first line. The class count is inferred
/// from the first data row.
pub fn read_logits_csv(path: &Path, has_labels: bool, has_header: bool) -> Result<LogitDataset> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut labels: Vec<usize> = Vec::new();
    let mut expected_cols: Option<usize> = None;

    for (line_idx, line) in text.lines().enumerate() {
        let line_no = line_idx + 1;
        if has_header && line_idx == 0 {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        match expected_cols {
            None => expected_cols = Some(cells.len()),
            Some(n) if cells.len() != n => {
                return Err(Error::Parse {
                    line: line_no,
                    column: None,
                    message: format!("row has {} columns, expected {n}", cells.len()),
                });
            }
            Some(_) => {}
        }

        let n_logits = if has_labels {
            cells.len().saturating_sub(1)
        } else {
            cells.len()
        };
        let mut row = Vec::with_capacity(n_logits);
        for (col_idx, cell) in cells[..n_logits].iter().enumerate() {
            let value: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                column: Some(col_idx + 1),
                message: format!("not a number: {cell:?}"),
            })?;
            row.push(value);
        }
        if has_labels {
            let cell = cells[n_logits];
            let label: usize = cell.trim().parse().map_err(|_| Error::Parse {
                line: line_no,
                column: Some(n_logits + 1),
                message: format!("not an integer label: {cell:?}"),
            })?;
            labels.push(label);
        }
        rows.push(row);
    }

    LogitDataset::from_rows(rows, has_labels.then_some(labels))
}

fn format_row(values: &[f64], label: Option<usize>, out: &mut String) {
    for (j, v) in values.iter().enumerate() {
        if j > 0 {
            out.push(',');
        }
        out.push_str(&format!("{v}"));
    }
    if let Some(label) = label {
        out.push(',');
        out.push_str(&label.to_string());
    }
    out.push('\n');
}

/// Write a logits CSV in the format [`read_logits_csv`] accepts, including
/// the label column when the dataset is labelled.
pub fn write_logits_csv(path: &Path, data: &LogitDataset) -> Result<()> {
    let mut out = String::new();
    for (i, row) in data.rows().enumerate() {
        format_row(row, data.labels().map(|l| l[i]), &mut out);
    }
    write_atomic(path, out.as_bytes())
}

/// Write calibrated probabilities as CSV, one row per sample.
pub fn write_probs_csv(path: &Path, probs: &ConfidenceMatrix) -> Result<()> {
    let mut out = String::new();
    for row in probs.rows() {
        format_row(row, None, &mut out);
    }
    write_atomic(path, out.as_bytes())
}

/// Split into a calibration part and a test part by a seeded uniform
/// shuffle: the first `max(1, floor(fraction * N))` shuffled samples form
/// the calibration set. Label presence carries over to both parts.
pub fn split(
    data: &LogitDataset,
    calib_fraction: f64,
    seed: u64,
) -> Result<(LogitDataset, LogitDataset)> {
    if !calib_fraction.is_finite() || calib_fraction <= 0.0 || calib_fraction >= 1.0 {
        return Err(Error::InvalidFraction(calib_fraction));
    }
    let n = data.n_samples();
    if n < 2 {
        return Err(Error::InvalidShape {
            reason: "splitting needs at least two samples".into(),
        });
    }

    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in (1..n).rev() {
        let j = rng.random_range(0..=i);
        indices.swap(i, j);
    }

    let n_calib = ((calib_fraction * n as f64).floor() as usize).max(1);
    let calib = data.select(&indices[..n_calib])?;
    let test = data.select(&indices[n_calib..])?;
    Ok((calib, test))
}
