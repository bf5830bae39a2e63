//! Unsupervised temperature fitting.
//!
//! Labels are replaced by per-class sample subsets: for each class k, the
//! samples whose class-k confidence clears a data-driven threshold act as
//! stand-ins for class-k ground truth. The temperature is then fitted by
//! minimizing a class-wise negative log likelihood over those subsets.
//!
//! Subsets are built once from the uncalibrated (temperature 1) confidences
//! and frozen for the whole fit, which keeps the objective well-defined and
//! the result deterministic.

use serde::{Deserialize, Serialize};

use crate::dataset::LogitDataset;
use crate::error::{Error, Result};
use crate::metrics::PROB_FLOOR;
use crate::optimize::{minimize_scalar, OptimizerConfig};
use crate::softmax::{predict, tempered_softmax, ConfidenceMatrix, FitMethod, Temperature};

/// Per-class selection thresholds plus the complement sizes they were
/// computed from.
#[derive(Debug, Clone, PartialEq)]
pub struct Thresholds {
    /// One threshold per class.
    pub values: Vec<f64>,
    /// Size of the sample set each threshold was computed over.
    pub complement_sizes: Vec<usize>,
    /// Fallback notices (a class every sample was predicted as).
    pub warnings: Vec<String>,
}

/// Frozen per-class subsets driving the unsupervised loss.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassSubsets {
    /// Per-class selection thresholds.
    pub thresholds: Vec<f64>,
    /// Per class, the ascending sample indices whose class confidence met
    /// the threshold. Subsets may overlap across classes.
    pub subsets: Vec<Vec<usize>>,
    /// Size of the sample set each threshold was computed over.
    pub complement_sizes: Vec<usize>,
}

impl ClassSubsets {
    pub fn n_classes(&self) -> usize {
        self.thresholds.len()
    }

    /// Classes whose subset came out empty and are skipped by the loss.
    pub fn empty_classes(&self) -> Vec<usize> {
        self.subsets
            .iter()
            .enumerate()
            .filter(|(_, m)| m.is_empty())
            .map(|(k, _)| k)
            .collect()
    }
}

/// Per-class threshold: mean plus population standard deviation of the
/// class-k confidence over the samples *not* predicted as k.
///
/// When every sample is predicted as k that complement is empty; the
/// threshold then falls back to the statistics over all samples and a
/// warning is recorded.
pub fn compute_thresholds(probs: &ConfidenceMatrix) -> Thresholds {
    let n = probs.n_samples();
    let k_classes = probs.n_classes();
    let predictions = predict(probs);

    let mut values = Vec::with_capacity(k_classes);
    let mut complement_sizes = Vec::with_capacity(k_classes);
    let mut warnings = Vec::new();

    for k in 0..k_classes {
        let in_complement = |i: usize| predictions[i].predicted_class != k;
        let mut count = (0..n).filter(|&i| in_complement(i)).count();
        let use_all = count == 0;
        if use_all {
            warnings.push(format!(
                "every sample is predicted as class {k}; threshold falls back to all samples"
            ));
            count = n;
        }

        let selected = (0..n).filter(|&i| use_all || in_complement(i));
        let mut sum = 0.0;
        for i in selected.clone() {
            sum += probs.row(i)[k];
        }
        let mean = sum / count as f64;
        let mut sq_sum = 0.0;
        for i in selected {
            let d = mean - probs.row(i)[k];
            sq_sum += d * d;
        }
        let std = (sq_sum / count as f64).sqrt();

        values.push(mean + std);
        complement_sizes.push(count);
    }

    Thresholds {
        values,
        complement_sizes,
        warnings,
    }
}

/// Collect, per class, the samples whose class confidence meets or exceeds
/// the threshold. Errors when every subset is empty.
pub fn build_subsets(probs: &ConfidenceMatrix, thresholds: &Thresholds) -> Result<ClassSubsets> {
    if thresholds.values.len() != probs.n_classes() {
        return Err(Error::InvalidShape {
            reason: format!(
                "{} thresholds for {} classes",
                thresholds.values.len(),
                probs.n_classes()
            ),
        });
    }
    let subsets: Vec<Vec<usize>> = thresholds
        .values
        .iter()
        .enumerate()
        .map(|(k, &theta)| {
            (0..probs.n_samples())
                .filter(|&i| probs.row(i)[k] >= theta)
                .collect()
        })
        .collect();
    if subsets.iter().all(Vec::is_empty) {
        return Err(Error::NoUsableSubsets);
    }
    Ok(ClassSubsets {
        thresholds: thresholds.values.clone(),
        subsets,
        complement_sizes: thresholds.complement_sizes.clone(),
    })
}

/// Class-wise negative log likelihood over the frozen subsets at the given
/// temperature: for each class k, sum `-log p[i][k]` over the members of its
/// subset, class-major in ascending sample order.
///
/// Probabilities that underflow are clamped like the supervised loss so the
/// objective stays finite across the whole search bracket.
pub fn uts_loss(data: &LogitDataset, subsets: &ClassSubsets, temperature: f64) -> Result<f64> {
    if subsets.n_classes() != data.n_classes() {
        return Err(Error::InvalidShape {
            reason: format!(
                "subsets describe {} classes, dataset has {}",
                subsets.n_classes(),
                data.n_classes()
            ),
        });
    }
    let probs = tempered_softmax(data, temperature)?;
    let mut loss = 0.0;
    for (k, members) in subsets.subsets.iter().enumerate() {
        for &i in members {
            if i >= probs.n_samples() {
                return Err(Error::InvalidShape {
                    reason: format!("subset for class {k} references sample {i} out of range"),
                });
            }
            loss -= probs.row(i)[k].max(PROB_FLOOR).ln();
        }
    }
    Ok(loss)
}

/// A fitted unsupervised temperature, the subsets it was fitted on, and any
/// warnings raised along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct UtsFit {
    pub temperature: Temperature,
    pub subsets: ClassSubsets,
    pub warnings: Vec<String>,
}

/// Fit a temperature without labels.
///
/// Pipeline: uncalibrated softmax, per-class thresholds, frozen subsets,
/// then scalar minimization of [`uts_loss`]. Labels attached to the dataset
/// are never read.
pub fn fit_uts(data: &LogitDataset, cfg: &OptimizerConfig) -> Result<UtsFit> {
    let mut warnings = Vec::new();
    if data.n_samples() < data.n_classes() {
        warnings.push(format!(
            "only {} samples for {} classes; thresholds will be noisy",
            data.n_samples(),
            data.n_classes()
        ));
    }

    let uncalibrated = tempered_softmax(data, 1.0)?;
    let thresholds = compute_thresholds(&uncalibrated);
    warnings.extend(thresholds.warnings.iter().cloned());
    let subsets = build_subsets(&uncalibrated, &thresholds)?;
    for k in subsets.empty_classes() {
        warnings.push(format!(
            "subset for class {k} is empty; class excluded from the loss"
        ));
    }

    let outcome = minimize_scalar(
        |t| uts_loss(data, &subsets, t).expect("subsets validated against dataset"),
        cfg,
    )?;
    if let Some(w) = outcome.boundary_warning(cfg) {
        warnings.push(w);
    }

    Ok(UtsFit {
        temperature: Temperature {
            value: outcome.t_star,
            method: FitMethod::Uts,
            loss_at_optimum: outcome.f_star,
            evaluations: outcome.evaluations,
        },
        subsets,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{RngExt, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn matrix(rows: Vec<Vec<f64>>) -> ConfidenceMatrix {
        ConfidenceMatrix::from_rows(rows, 1.0).unwrap()
    }

    fn random_dataset(seed: u64, n: usize, k: usize) -> LogitDataset {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rows = (0..n)
            .map(|_| (0..k).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        LogitDataset::from_rows(rows, None).unwrap()
    }

    #[test]
    fn threshold_hand_oracle() {
        // class 2 complement values {0.2, 0.4}: mean 0.3, std 0.1, threshold 0.4
        let probs = matrix(vec![vec![0.5, 0.3, 0.2], vec![0.1, 0.5, 0.4]]);
        let thresholds = compute_thresholds(&probs);
        assert!((thresholds.values[2] - 0.4).abs() <= 1e-12);
        assert_eq!(thresholds.complement_sizes, vec![1, 1, 2]);
        assert!(thresholds.warnings.is_empty());
        // singleton complements have zero spread: threshold equals the value
        assert!((thresholds.values[0] - 0.1).abs() <= 1e-12);
        assert!((thresholds.values[1] - 0.3).abs() <= 1e-12);
    }

    #[test]
    fn threshold_zero_variance() {
        let probs = matrix(vec![vec![0.75, 0.25], vec![0.75, 0.25]]);
        let thresholds = compute_thresholds(&probs);
        // complement of class 1 is both samples, all at 0.25
        assert_eq!(thresholds.values[1], 0.25);
        assert_eq!(thresholds.complement_sizes[1], 2);
    }

    #[test]
    fn threshold_empty_complement_falls_back() {
        // every sample predicted class 0
        let probs = matrix(vec![vec![0.9, 0.1], vec![0.8, 0.2]]);
        let thresholds = compute_thresholds(&probs);
        assert_eq!(thresholds.complement_sizes[0], 2);
        assert_eq!(thresholds.warnings.len(), 1);
        assert!(thresholds.warnings[0].contains("class 0"));
        // fallback statistics: mean 0.85, population std 0.05
        assert!((thresholds.values[0] - 0.9).abs() <= 1e-12);
    }

    #[test]
    fn thresholds_match_naive_loop() {
        let data = random_dataset(21, 50, 3);
        let probs = tempered_softmax(&data, 1.0).unwrap();
        let got = compute_thresholds(&probs);
        let preds = predict(&probs);
        for k in 0..3 {
            let vals: Vec<f64> = (0..50)
                .filter(|&i| preds[i].predicted_class != k)
                .map(|i| probs.row(i)[k])
                .collect();
            assert!(!vals.is_empty());
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (mean - v) * (mean - v)).sum::<f64>() / vals.len() as f64;
            assert!((got.values[k] - (mean + var.sqrt())).abs() < 1e-12);
        }
    }

    #[test]
    fn subsets_filter_inclusively() {
        let probs = matrix(vec![vec![0.9, 0.1], vec![0.1, 0.9]]);
        let thresholds = Thresholds {
            values: vec![0.5, 0.9],
            complement_sizes: vec![1, 1],
            warnings: vec![],
        };
        let subsets = build_subsets(&probs, &thresholds).unwrap();
        assert_eq!(subsets.subsets[0], vec![0]);
        assert_eq!(subsets.subsets[1], vec![1]); // 0.9 >= 0.9, inclusive
    }

    #[test]
    fn unreachable_threshold_empties_class() {
        let probs = matrix(vec![vec![0.9, 0.1], vec![0.8, 0.2]]);
        let thresholds = Thresholds {
            values: vec![0.85, 0.5],
            complement_sizes: vec![2, 2],
            warnings: vec![],
        };
        let subsets = build_subsets(&probs, &thresholds).unwrap();
        assert_eq!(subsets.subsets[1], Vec::<usize>::new());
        assert_eq!(subsets.empty_classes(), vec![1]);
        assert_eq!(subsets.subsets[0], vec![0]);
    }

    #[test]
    fn all_empty_subsets_error() {
        let probs = matrix(vec![vec![0.6, 0.4], vec![0.5, 0.5]]);
        let thresholds = Thresholds {
            values: vec![2.0, 2.0],
            complement_sizes: vec![1, 1],
            warnings: vec![],
        };
        assert!(matches!(
            build_subsets(&probs, &thresholds),
            Err(Error::NoUsableSubsets)
        ));
    }

    #[test]
    fn loss_trivial_cases() {
        // a certain member contributes nothing
        let data = LogitDataset::from_rows(vec![vec![60.0, 0.0]], None).unwrap();
        let subsets = ClassSubsets {
            thresholds: vec![0.5, 0.5],
            subsets: vec![vec![0], vec![]],
            complement_sizes: vec![1, 1],
        };
        let loss = uts_loss(&data, &subsets, 1.0).unwrap();
        assert!(loss.abs() < 1e-12);

        // a member with tempered probability exp(-1) contributes exactly 1
        let p = (-1f64).exp();
        let gap = (p / (1.0 - p)).ln(); // two-class logit gap giving that probability
        let data = LogitDataset::from_rows(vec![vec![gap, 0.0]], None).unwrap();
        let subsets = ClassSubsets {
            thresholds: vec![0.5, 0.5],
            subsets: vec![vec![0], vec![]],
            complement_sizes: vec![1, 1],
        };
        let loss = uts_loss(&data, &subsets, 1.0).unwrap();
        assert!((loss - 1.0).abs() < 1e-12);
    }

    #[test]
    fn loss_matches_naive_triple_loop() {
        let data = random_dataset(5, 40, 4);
        let probs = tempered_softmax(&data, 1.0).unwrap();
        let thresholds = compute_thresholds(&probs);
        let subsets = build_subsets(&probs, &thresholds).unwrap();
        for t in [0.5, 1.0, 1.7, 3.0] {
            let got = uts_loss(&data, &subsets, t).unwrap();
            let mut wanted = 0.0;
            for k in 0..4 {
                for i in 0..40 {
                    if subsets.subsets[k].contains(&i) {
                        let row = data.row(i);
                        let sum: f64 = row.iter().map(|&h| (h / t).exp()).sum();
                        wanted -= ((row[k] / t).exp() / sum).ln();
                    }
                }
            }
            assert!((got - wanted).abs() < 1e-10, "t={t}: {got} vs {wanted}");
        }
    }

    #[test]
    fn fit_ignores_labels_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let rows: Vec<Vec<f64>> = (0..120)
            .map(|_| (0..5).map(|_| rng.random_range(-4.0..4.0)).collect())
            .collect();
        let labels: Vec<usize> = (0..120).map(|_| rng.random_range(0..5)).collect();
        let labelled = LogitDataset::from_rows(rows, Some(labels)).unwrap();
        let stripped = labelled.without_labels();

        let cfg = OptimizerConfig::default();
        let a = fit_uts(&labelled, &cfg).unwrap();
        let b = fit_uts(&stripped, &cfg).unwrap();
        assert_eq!(a.temperature.value.to_bits(), b.temperature.value.to_bits());
        assert_eq!(
            a.temperature.loss_at_optimum.to_bits(),
            b.temperature.loss_at_optimum.to_bits()
        );
        assert_eq!(a.subsets, b.subsets);
        assert_eq!(a.warnings, b.warnings);
    }

    #[test]
    fn subsets_are_pure_function_of_uncalibrated_confidences() {
        let data = random_dataset(33, 80, 3);
        let cfg = OptimizerConfig::default();
        let first = fit_uts(&data, &cfg).unwrap();
        let second = fit_uts(&data, &cfg).unwrap();
        assert_eq!(first.subsets, second.subsets);
        let l1 = uts_loss(&data, &first.subsets, 1.3).unwrap();
        let l2 = uts_loss(&data, &first.subsets, 1.3).unwrap();
        assert_eq!(l1.to_bits(), l2.to_bits());
    }

    #[test]
    fn permuting_samples_permutes_nothing_essential() {
        let data = random_dataset(44, 60, 3);
        let n = data.n_samples();
        let perm: Vec<usize> = (0..n).rev().collect();
        let permuted = data.select(&perm).unwrap();

        let probs = tempered_softmax(&data, 1.0).unwrap();
        let probs_p = tempered_softmax(&permuted, 1.0).unwrap();
        let thr = compute_thresholds(&probs);
        let thr_p = compute_thresholds(&probs_p);
        for k in 0..3 {
            assert!((thr.values[k] - thr_p.values[k]).abs() < 1e-12);
        }

        let subsets = build_subsets(&probs, &thr).unwrap();
        let subsets_p = build_subsets(&probs_p, &thr_p).unwrap();
        for k in 0..3 {
            // map permuted indices back to original and compare as sets
            let mut mapped: Vec<usize> = subsets_p.subsets[k].iter().map(|&i| perm[i]).collect();
            mapped.sort_unstable();
            assert_eq!(mapped, subsets.subsets[k]);
        }

        let cfg = OptimizerConfig::default();
        let t = fit_uts(&data, &cfg).unwrap().temperature.value;
        let t_p = fit_uts(&permuted, &cfg).unwrap().temperature.value;
        assert!((t - t_p).abs() < 1e-9, "{t} vs {t_p}");
    }

    #[test]
    fn small_sample_warning() {
        let data = random_dataset(2, 3, 4);
        let fit = fit_uts(&data, &OptimizerConfig::default()).unwrap();
        assert!(fit.warnings.iter().any(|w| w.contains("3 samples")));
    }
}
