//! Bounded one-dimensional minimization over a positive scalar.
//!
//! The search runs in two phases: a log-spaced grid scan over the bracket,
//! then golden-section refinement inside the best grid point's neighboring
//! interval. The grid phase makes no smoothness assumption; the refinement
//! phase sharpens the answer to `refine_tol`.

use crate::error::{Error, Result};

/// Search bracket and stopping rules for [`minimize_scalar`].
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Lower end of the search bracket, > 0.
    pub t_min: f64,
    /// Upper end of the search bracket, > `t_min`.
    pub t_max: f64,
    /// Number of log-spaced grid points scanned before refinement.
    pub grid_points: usize,
    /// Absolute tolerance on the refined minimizer.
    pub refine_tol: f64,
    /// Cap on golden-section iterations.
    pub max_refine_iters: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            t_min: 0.05,
            t_max: 20.0,
            grid_points: 200,
            refine_tol: 1e-4,
            max_refine_iters: 200,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_min.is_finite() && self.t_max.is_finite()) || self.t_min <= 0.0 {
            return Err(Error::InvalidConfig {
                reason: format!(
                    "bracket must be finite and positive, got [{}, {}]",
                    self.t_min, self.t_max
                ),
            });
        }
        if self.t_min >= self.t_max {
            return Err(Error::InvalidConfig {
                reason: format!("bracket is empty: [{}, {}]", self.t_min, self.t_max),
            });
        }
        if self.grid_points < 3 {
            return Err(Error::InvalidConfig {
                reason: format!("need at least 3 grid points, got {}", self.grid_points),
            });
        }
        if !(self.refine_tol > 0.0 && self.refine_tol.is_finite()) {
            return Err(Error::InvalidConfig {
                reason: format!("refine_tol must be positive, got {}", self.refine_tol),
            });
        }
        if self.max_refine_iters == 0 {
            return Err(Error::InvalidConfig {
                reason: "max_refine_iters must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Which end of the bracket the minimizer landed on, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryHit {
    Lower,
    Upper,
}

/// Outcome of a scalar minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct MinimizeOutcome {
    /// Best evaluated point.
    pub t_star: f64,
    /// Objective value at `t_star`.
    pub f_star: f64,
    /// Total objective evaluations (grid plus refinement).
    pub evaluations: usize,
    /// Set when `t_star` lies within `refine_tol` of a bracket end.
    pub boundary: Option<BoundaryHit>,
}

impl MinimizeOutcome {
    /// Human-readable warning for a boundary hit, if one occurred.
    pub fn boundary_warning(&self, cfg: &OptimizerConfig) -> Option<String> {
        self.boundary.map(|side| {
            let end = match side {
                BoundaryHit::Lower => cfg.t_min,
                BoundaryHit::Upper => cfg.t_max,
            };
            format!(
                "minimizer {:.6} sits at the search boundary {end}; consider widening [t_min, t_max]",
                self.t_star
            )
        })
    }
}

/// `n` log-spaced points spanning `[lo, hi]`, endpoints exact.
pub fn log_spaced_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (ln_lo, ln_hi) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == n - 1 {
                hi
            } else {
                (ln_lo + (ln_hi - ln_lo) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

const INV_PHI: f64 = 0.618_033_988_749_894_9; // (sqrt(5) - 1) / 2

/// Minimize `f` over the configured bracket.
///
/// The grid argmin is taken by ascending index (first minimum wins) and the
/// refinement is sequential, so identical inputs give bit-identical results.
/// Errors when more than half the grid evaluations are non-finite.
pub fn minimize_scalar<F>(mut f: F, cfg: &OptimizerConfig) -> Result<MinimizeOutcome>
where
    F: FnMut(f64) -> f64,
{
    cfg.validate()?;
    let grid = log_spaced_grid(cfg.t_min, cfg.t_max, cfg.grid_points);
    let mut evaluations = 0usize;

    let values: Vec<f64> = grid
        .iter()
        .map(|&t| {
            evaluations += 1;
            f(t)
        })
        .collect();

    let offending: Vec<f64> = grid
        .iter()
        .zip(&values)
        .filter(|(_, v)| !v.is_finite())
        .map(|(&t, _)| t)
        .collect();
    if 2 * offending.len() > cfg.grid_points {
        return Err(Error::ObjectiveNonFinite {
            grid_points: cfg.grid_points,
            offending,
        });
    }

    let mut best_idx = None;
    for (i, &v) in values.iter().enumerate() {
        if v.is_finite() && best_idx.is_none_or(|b: usize| v < values[b]) {
            best_idx = Some(i);
        }
    }
    // At most half the grid is non-finite here, so a finite point exists.
    let best_idx = best_idx.expect("grid holds at least one finite value");
    let mut t_best = grid[best_idx];
    let mut f_best = values[best_idx];

    // Refine inside the neighboring grid interval around the best point.
    let mut lo = grid[best_idx.saturating_sub(1)];
    let mut hi = grid[(best_idx + 1).min(cfg.grid_points - 1)];
    let observe = |t: f64, v: f64, t_best: &mut f64, f_best: &mut f64| {
        if v.is_finite() && v < *f_best {
            *t_best = t;
            *f_best = v;
        }
    };

    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    evaluations += 2;
    observe(x1, f1, &mut t_best, &mut f_best);
    observe(x2, f2, &mut t_best, &mut f_best);

    let mut iters = 0usize;
    while hi - lo > cfg.refine_tol && iters < cfg.max_refine_iters {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
            evaluations += 1;
            observe(x1, f1, &mut t_best, &mut f_best);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
            evaluations += 1;
            observe(x2, f2, &mut t_best, &mut f_best);
        }
        iters += 1;
    }

    let boundary = if t_best - cfg.t_min <= cfg.refine_tol {
        Some(BoundaryHit::Lower)
    } else if cfg.t_max - t_best <= cfg.refine_tol {
        Some(BoundaryHit::Upper)
    } else {
        None
    };

    Ok(MinimizeOutcome {
        t_star: t_best,
        f_star: f_best,
        evaluations,
        boundary,
    })
}
