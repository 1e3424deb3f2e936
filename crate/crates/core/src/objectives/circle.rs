//! Population loss of a one-layer step-activation network on the circle.
//!
//! Inputs are uniform directions x on the unit circle; a unit at angle t
//! responds with 1[<x, (cos t, sin t)> > 0]. Two units at circular distance
//! a agree on their positive half-circles over an arc of length pi - a, so
//! E_x[phi_s(x) phi_t(x)] = (pi - dist(s, t)) / (2 pi). Expanding the squared
//! population error of the particle average against a fixed target response
//! leaves only circular distances:
//!
//!   L(mu) = [ (2/n) sum_i A(theta_i)
//!             - (1/n^2) sum_{i,j} dist(theta_i, theta_j)
//!             - C ] / (2 pi)
//!
//! where A(t) is the mean circular distance from t to the target directions
//! and C is the mean distance within the target. A Monte Carlo estimator of
//! the same loss straight from the definition is provided as a cross-check.

use std::f64::consts::{PI, TAU};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::measure::{lex_order, SparseMeasure};

use super::{check_dim, Gradient, Objective, Regularity};

/// Signed angular difference wrapped to [-pi, pi).
pub(crate) fn wrap(delta: f64) -> f64 {
    (delta + PI).rem_euclid(TAU) - PI
}

/// Circular distance, in [0, pi].
pub fn circular_distance(a: f64, b: f64) -> f64 {
    wrap(a - b).abs()
}

/// Derivative of dist(theta, y) in theta, given the wrapped difference.
/// Zero at the kinks (coincidence and antipode).
fn dist_slope(wrapped: f64) -> f64 {
    if wrapped == 0.0 || wrapped.abs() >= PI {
        0.0
    } else {
        wrapped.signum()
    }
}

/// Antiderivative of u -> dist(u, 0): continuous, with G' equal to the
/// wrapped distance everywhere.
fn dist_antiderivative(u: f64) -> f64 {
    let m = ((u + PI) / TAU).floor();
    let r = u - TAU * m;
    m * PI * PI + 0.5 * r * r.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CircleTarget {
    /// Equal-weight directions. Angles are restricted to the upper
    /// half-circle [0, pi) so the target units are pairwise distinct as
    /// functions of the input.
    Sparse { angles: Vec<f64> },
    /// Uniform density on [lo, hi]. Width at most pi, so linear and
    /// circular distances agree within the arc.
    UniformArc { lo: f64, hi: f64 },
}

impl CircleTarget {
    pub fn validate(&self) -> Result<()> {
        match self {
            CircleTarget::Sparse { angles } => {
                if angles.is_empty() {
                    return Err(Error::invalid("sparse circle target needs at least one angle"));
                }
                for &a in angles {
                    if !a.is_finite() {
                        return Err(Error::NonFinite { context: "target angle" });
                    }
                    if !(0.0..PI).contains(&a) {
                        return Err(Error::invalid(format!(
                            "target angles must lie in [0, pi), got {a}"
                        )));
                    }
                }
            }
            CircleTarget::UniformArc { lo, hi } => {
                if !lo.is_finite() || !hi.is_finite() {
                    return Err(Error::NonFinite { context: "arc endpoint" });
                }
                if !(lo < hi) {
                    return Err(Error::invalid(format!("arc needs lo < hi, got [{lo}, {hi}]")));
                }
                if hi - lo > PI {
                    return Err(Error::invalid(format!("arc width {} exceeds pi", hi - lo)));
                }
                if *lo < 0.0 || *hi > TAU {
                    return Err(Error::invalid("arc must lie within [0, 2 pi]"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct CircleNet {
    target: CircleTarget,
    /// Sorted angles for the sparse case, empty for an arc.
    sparse_sorted: Vec<f64>,
    /// Mean circular distance within the target.
    target_self: f64,
}

impl CircleNet {
    pub fn new(target: CircleTarget) -> Result<Self> {
        target.validate()?;
        let (sparse_sorted, target_self) = match &target {
            CircleTarget::Sparse { angles } => {
                let mut sorted = angles.clone();
                sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
                let m = sorted.len();
                let mut acc = 0.0;
                for &a in &sorted {
                    for &b in &sorted {
                        acc += circular_distance(a, b);
                    }
                }
                (sorted, acc / (m * m) as f64)
            }
            CircleTarget::UniformArc { lo, hi } => (Vec::new(), (hi - lo) / 3.0),
        };
        Ok(CircleNet { target, sparse_sorted, target_self })
    }

    pub fn target(&self) -> &CircleTarget {
        &self.target
    }

    pub fn target_self_mean(&self) -> f64 {
        self.target_self
    }

    /// Mean circular distance from `theta` to the target directions.
    pub fn mean_dist_to_target(&self, theta: f64) -> f64 {
        match &self.target {
            CircleTarget::Sparse { .. } => {
                let mut acc = 0.0;
                for &a in &self.sparse_sorted {
                    acc += circular_distance(theta, a);
                }
                acc / self.sparse_sorted.len() as f64
            }
            CircleTarget::UniformArc { lo, hi } => {
                (dist_antiderivative(theta - lo) - dist_antiderivative(theta - hi)) / (hi - lo)
            }
        }
    }

    fn mean_dist_slope(&self, theta: f64) -> f64 {
        match &self.target {
            CircleTarget::Sparse { .. } => {
                let mut acc = 0.0;
                for &a in &self.sparse_sorted {
                    acc += dist_slope(wrap(theta - a));
                }
                acc / self.sparse_sorted.len() as f64
            }
            CircleTarget::UniformArc { lo, hi } => {
                (circular_distance(theta, *lo) - circular_distance(theta, *hi)) / (hi - lo)
            }
        }
    }

    /// Target network response to the input direction at angle `psi`.
    pub fn target_response(&self, psi: f64) -> f64 {
        match &self.target {
            CircleTarget::Sparse { .. } => {
                let hits = self.sparse_sorted.iter().filter(|&&a| (psi - a).cos() > 0.0).count();
                hits as f64 / self.sparse_sorted.len() as f64
            }
            CircleTarget::UniformArc { lo, hi } => {
                // Units activated by psi fill the open half-circle window
                // around psi; shifted copies of the arc catch wrap-around.
                let a = psi - PI / 2.0;
                let b = psi + PI / 2.0;
                let mut acc = 0.0;
                for k in [-1.0, 0.0, 1.0] {
                    let l = lo + TAU * k;
                    let h = hi + TAU * k;
                    acc += (b.min(h) - a.max(l)).max(0.0);
                }
                acc / (hi - lo)
            }
        }
    }

    /// Monte Carlo estimate of the loss from its definition, with the
    /// standard error of the mean. Independent of the closed form.
    pub fn mc_loss(&self, mu: &SparseMeasure, samples: usize, seed: u64) -> Result<(f64, f64)> {
        check_dim(1, mu)?;
        if samples < 2 {
            return Err(Error::invalid("mc_loss needs at least 2 samples"));
        }
        let thetas: Vec<f64> = mu.rows().map(|r| r[0]).collect();
        let n = thetas.len() as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for _ in 0..samples {
            let psi: f64 = rng.gen_range(0.0..TAU);
            let f_mu = thetas.iter().filter(|&&t| (psi - t).cos() > 0.0).count() as f64 / n;
            let err = self.target_response(psi) - f_mu;
            let v = err * err;
            sum += v;
            sum_sq += v * v;
        }
        let count = samples as f64;
        let mean = sum / count;
        let var = (sum_sq - count * mean * mean).max(0.0) / (count - 1.0);
        Ok((mean, (var / count).sqrt()))
    }
}

impl Objective for CircleNet {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        check_dim(1, mu)?;
        let order = lex_order(mu);
        let theta: Vec<f64> = order.iter().map(|&i| mu.particle(i)[0]).collect();
        let n = theta.len() as f64;
        let mut attract = 0.0;
        for &t in &theta {
            attract += self.mean_dist_to_target(t);
        }
        let mut repel = 0.0;
        for &a in &theta {
            for &b in &theta {
                repel += circular_distance(a, b);
            }
        }
        Ok(((2.0 / n) * attract - repel / (n * n) - self.target_self) / TAU)
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        check_dim(1, mu)?;
        let n = mu.n();
        let order = lex_order(mu);
        let rows = exec::map_indexed(n, |i| {
            let t = mu.particle(i)[0];
            let mut pair = 0.0;
            for &j in &order {
                pair += dist_slope(wrap(t - mu.particle(j)[0]));
            }
            ((2.0 / n as f64) * self.mean_dist_slope(t) - (2.0 / (n * n) as f64) * pair) / TAU
        });
        Ok(Gradient::from_flat(n, 1, rows))
    }

    fn regularity(&self) -> Regularity {
        Regularity::none()
    }
}
