//! Seeded generator of miscalibrated classifier outputs with a known
//! ground-truth temperature.
//!
//! Base logits are drawn i.i.d. normal, labels are sampled from the softmax
//! of those base logits, and the emitted logits are the base logits scaled
//! by the ground-truth temperature. Scaling up (> 1) yields an overconfident
//! model whose NLL-optimal temperature approaches the ground truth as the
//! sample count grows.
//!
//! Reproducibility contract: the stream is ChaCha8 seeded with
//! `seed_from_u64`; each sample consumes, in order, two uniform doubles per
//! base logit (Box-Muller, cosine branch) and one uniform double for the
//! label (inverse CDF over the row's cumulative probabilities).

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::LogitDataset;
use crate::error::{Error, Result};

/// Spread of the base logits used when no explicit scale is given.
pub const DEFAULT_LOGIT_SCALE: f64 = 2.0;

/// Shape, ground truth, and seed for one synthetic dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub n_samples: usize,
    pub n_classes: usize,
    /// Ground-truth temperature the emitted logits are scaled by.
    pub true_temperature: f64,
    /// Standard deviation of the base logits.
    pub logit_scale: f64,
    pub seed: u64,
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.n_samples == 0 {
            return Err(Error::InvalidConfig {
                reason: "need at least one sample".into(),
            });
        }
        if self.n_classes < 2 {
            return Err(Error::InvalidConfig {
                reason: format!("need at least two classes, got {}", self.n_classes),
            });
        }
        if !self.true_temperature.is_finite() || self.true_temperature <= 0.0 {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "true_temperature must be finite and > 0, got {}",
                    self.true_temperature
                ),
            });
        }
        if !self.logit_scale.is_finite() || self.logit_scale <= 0.0 {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "logit_scale must be finite and > 0, got {}",
                    self.logit_scale
                ),
            });
        }
        Ok(())
    }
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    // u1 in (0, 1] keeps the log finite; u2 in [0, 1)
    let u1 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Generate a labelled dataset per the module's reproducibility contract.
pub fn generate(cfg: &SynthConfig) -> Result<LogitDataset> {
    cfg.validate()?;
    let (n, k) = (cfg.n_samples, cfg.n_classes);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut logits = Vec::with_capacity(n * k);
    let mut labels = Vec::with_capacity(n);
    let mut base = vec![0.0f64; k];
    let mut probs = vec![0.0f64; k];

    for _ in 0..n {
        for z in base.iter_mut() {
            *z = cfg.logit_scale * standard_normal(&mut rng);
        }

        let max = base.iter().fold(f64::NEG_INFINITY, |m, &z| m.max(z));
        let mut sum = 0.0;
        for (p, &z) in probs.iter_mut().zip(&base) {
            *p = (z - max).exp();
            sum += *p;
        }
        for p in probs.iter_mut() {
            *p /= sum;
        }

        let u: f64 = rng.random();
        let mut label = k - 1; // float tail of the cumulative sum
        let mut cum = 0.0;
        for (j, &p) in probs.iter().enumerate() {
            cum += p;
            if u < cum {
                label = j;
                break;
            }
        }
        labels.push(label);

        logits.extend(base.iter().map(|&z| cfg.true_temperature * z));
    }

    LogitDataset::new(logits, n, k, Some(labels))
}
