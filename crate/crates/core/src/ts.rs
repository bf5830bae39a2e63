//! Supervised temperature fitting: minimize the labelled NLL over the
//! scaling temperature.

use crate::dataset::LogitDataset;
use crate::error::Result;
use crate::metrics::nll;
use crate::optimize::{minimize_scalar, OptimizerConfig};
use crate::softmax::{tempered_softmax, FitMethod, Temperature};

/// A fitted supervised temperature plus any warnings raised along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct TsFit {
    pub temperature: Temperature,
    pub warnings: Vec<String>,
}

/// Fit a temperature on a labelled dataset by minimizing the NLL sum.
///
/// The objective at each candidate temperature rescales the logits, takes
/// the softmax, and sums `-log p[label]` over all samples. A single-class
/// label vector is allowed but flagged, since it pins the fit to one class's
/// confidences only.
pub fn fit_ts(data: &LogitDataset, cfg: &OptimizerConfig) -> Result<TsFit> {
    let labels = data.require_labels()?;
    if data.n_samples() < 2 {
        return Err(crate::error::Error::InvalidShape {
            reason: "temperature fitting needs at least two samples".into(),
        });
    }

    let mut warnings = Vec::new();
    let first = labels[0];
    if labels.iter().all(|&l| l == first) {
        warnings.push(format!(
            "all {} labels belong to class {first}; the fit may be poorly constrained",
            labels.len()
        ));
    }

    let objective = |t: f64| {
        // Both calls only fail on invalid temperature or label range, which
        // the optimizer bracket and dataset invariants already rule out.
        let probs = tempered_softmax(data, t).expect("bracket keeps t positive");
        nll(&probs, labels)
            .expect("labels validated at construction")
            .sum
    };
    let outcome = minimize_scalar(objective, cfg)?;
    if let Some(w) = outcome.boundary_warning(cfg) {
        warnings.push(w);
    }

    Ok(TsFit {
        temperature: Temperature {
            value: outcome.t_star,
            method: FitMethod::Ts,
            loss_at_optimum: outcome.f_star,
            evaluations: outcome.evaluations,
        },
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::metrics::nll;
    use crate::softmax::tempered_softmax;
    use crate::synth::{generate, SynthConfig};

    #[test]
    fn requires_labels_and_two_samples() {
        let unlabelled =
            LogitDataset::from_rows(vec![vec![1.0, 0.0], vec![0.0, 1.0]], None).unwrap();
        assert!(matches!(
            fit_ts(&unlabelled, &OptimizerConfig::default()),
            Err(Error::MissingLabels)
        ));
        let single = LogitDataset::from_rows(vec![vec![1.0, 0.0]], Some(vec![0])).unwrap();
        assert!(fit_ts(&single, &OptimizerConfig::default()).is_err());
    }

    #[test]
    fn single_class_labels_warn_but_fit() {
        let data = LogitDataset::from_rows(
            vec![vec![2.0, 0.0], vec![1.5, 0.1], vec![3.0, -1.0]],
            Some(vec![0, 0, 0]),
        )
        .unwrap();
        let fit = fit_ts(&data, &OptimizerConfig::default()).unwrap();
        assert!(fit.warnings.iter().any(|w| w.contains("class 0")));
        assert!(fit.temperature.value > 0.0);
    }

    #[test]
    fn fitted_nll_never_exceeds_uncalibrated() {
        let data = generate(&SynthConfig {
            n_samples: 2000,
            n_classes: 5,
            true_temperature: 3.0,
            logit_scale: 2.0,
            seed: 11,
        })
        .unwrap();
        let fit = fit_ts(&data, &OptimizerConfig::default()).unwrap();
        let labels = data.labels().unwrap();
        let at_fit = nll(
            &tempered_softmax(&data, fit.temperature.value).unwrap(),
            labels,
        )
        .unwrap()
        .sum;
        let at_one = nll(&tempered_softmax(&data, 1.0).unwrap(), labels)
            .unwrap()
            .sum;
        assert!(at_fit <= at_one + 1e-9);
        assert!((at_fit - fit.temperature.loss_at_optimum).abs() < 1e-9);
    }

    #[test]
    fn accuracy_unchanged_by_fitted_temperature() {
        let data = generate(&SynthConfig {
            n_samples: 1000,
            n_classes: 4,
            true_temperature: 2.0,
            logit_scale: 2.0,
            seed: 3,
        })
        .unwrap();
        let labels = data.labels().unwrap();
        let fit = fit_ts(&data, &OptimizerConfig::default()).unwrap();
        let before =
            crate::metrics::accuracy(&tempered_softmax(&data, 1.0).unwrap(), labels).unwrap();
        let after = crate::metrics::accuracy(
            &tempered_softmax(&data, fit.temperature.value).unwrap(),
            labels,
        )
        .unwrap();
        assert_eq!(before, after);
    }

    #[test]
    fn rescaled_logits_rescale_the_fit() {
        // with c <= 1 both fits land within (1 + c) * refine_tol of the
        // scaled pair, inside the stated 2 * refine_tol budget
        let cfg = OptimizerConfig::default();
        let data = generate(&SynthConfig {
            n_samples: 5000,
            n_classes: 5,
            true_temperature: 2.5,
            logit_scale: 2.0,
            seed: 7,
        })
        .unwrap();
        let base = fit_ts(&data, &cfg).unwrap().temperature.value;

        let c = 0.5;
        let scaled_rows: Vec<Vec<f64>> = data
            .rows()
            .map(|r| r.iter().map(|&h| c * h).collect())
            .collect();
        let scaled =
            LogitDataset::from_rows(scaled_rows, data.labels().map(<[usize]>::to_vec)).unwrap();
        let scaled_fit = fit_ts(&scaled, &cfg).unwrap().temperature.value;
        assert!(
            (scaled_fit - c * base).abs() <= 2.0 * cfg.refine_tol,
            "base={base}, scaled={scaled_fit}"
        );
    }
}
