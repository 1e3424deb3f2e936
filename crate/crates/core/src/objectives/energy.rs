//! Energy distance objectives on the line.
//!
//! For equal-size discrete measures mu = (1/n) sum delta_{w_i} and
//! nu = (1/n) sum delta_{v_j},
//!
//!   n^2 E(mu, nu) = 2 sum_{i,j} |w_i - v_j| - sum_{i,j} |v_i - v_j|
//!                   - sum_{i,j} |w_i - w_j|.
//!
//! Against the uniform density on [a, b] the cross term integrates in closed
//! form and the target self-term is (b - a)/3. Pairwise sums are evaluated
//! through sorted prefix sums in O(n log n); counts of strictly smaller and
//! strictly larger particles give exact subgradients with sign(0) = 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::SparseMeasure;

use super::{check_dim, cross_abs_sum, signed_rank, sorted_with_prefix, Gradient, Objective, Regularity};

/// Energy distance to a fixed discrete target with the same particle count.
#[derive(Debug, Clone)]
pub struct EnergyDistance {
    target_sorted: Vec<f64>,
    target_prefix: Vec<f64>,
    /// sum_{i,j} |v_i - v_j| over all target pairs.
    target_self: f64,
}

impl EnergyDistance {
    pub fn new(target: &SparseMeasure) -> Result<Self> {
        check_dim(1, target)?;
        let (target_sorted, target_prefix) =
            sorted_with_prefix(target.rows().map(|r| r[0]));
        let target_self = cross_abs_sum(&target_sorted, &target_sorted, &target_prefix);
        Ok(EnergyDistance { target_sorted, target_prefix, target_self })
    }

    pub fn target_n(&self) -> usize {
        self.target_sorted.len()
    }

    /// (1/m) sum_k |x - v_k|.
    pub(crate) fn mean_abs_to_target(&self, x: f64) -> f64 {
        cross_abs_sum(&[x], &self.target_sorted, &self.target_prefix)
            / self.target_n() as f64
    }

    /// Target self-interaction (1/m^2) sum |v_i - v_j|.
    pub(crate) fn target_self_mean(&self) -> f64 {
        let m = self.target_n() as f64;
        self.target_self / (m * m)
    }

    fn check(&self, mu: &SparseMeasure) -> Result<()> {
        check_dim(1, mu)?;
        if mu.n() != self.target_n() {
            return Err(Error::SizeMismatch { left: mu.n(), right: self.target_n() });
        }
        Ok(())
    }
}

impl Objective for EnergyDistance {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        self.check(mu)?;
        let n = mu.n();
        let (w, pw) = sorted_with_prefix(mu.rows().map(|r| r[0]));
        let cross = cross_abs_sum(&w, &self.target_sorted, &self.target_prefix);
        let self_w = cross_abs_sum(&w, &w, &pw);
        Ok((2.0 * cross - self.target_self - self_w) / (n * n) as f64)
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        self.check(mu)?;
        let n = mu.n();
        let (w, _) = sorted_with_prefix(mu.rows().map(|r| r[0]));
        let scale = 2.0 / (n * n) as f64;
        let mut g = Gradient::zeros(n, 1);
        for (i, row) in mu.rows().enumerate() {
            let x = row[0];
            g.row_mut(i)[0] =
                scale * (signed_rank(&self.target_sorted, x) - signed_rank(&w, x));
        }
        Ok(g)
    }

    fn regularity(&self) -> Regularity {
        Regularity { lambda: Some(0.0), smoothness: None, lipschitz: Some(2.0), star_convex: true }
    }
}

/// Energy distance to the uniform density on [a, b].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyDistanceUniform {
    a: f64,
    b: f64,
}

impl EnergyDistanceUniform {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(format!(
                "uniform target requires finite a < b, got [{a}, {b}]"
            )));
        }
        Ok(EnergyDistanceUniform { a, b })
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Mean absolute deviation integral against the normalized density:
    /// A(w) = integral |w - v| dv / (b - a). Inside the support this is
    /// ((w-a)^2 + (b-w)^2) / (2 (b-a)); outside it is |w - midpoint|.
    pub(crate) fn mean_abs(&self, w: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        if w < a {
            0.5 * (a + b) - w
        } else if w > b {
            w - 0.5 * (a + b)
        } else {
            let da = w - a;
            let db = b - w;
            (da * da + db * db) / (2.0 * (b - a))
        }
    }

    fn mean_abs_slope(&self, w: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        if w < a {
            -1.0
        } else if w > b {
            1.0
        } else {
            (2.0 * w - a - b) / (b - a)
        }
    }

    /// Target self-interaction integral: (b - a)/3.
    pub(crate) fn target_self_mean(&self) -> f64 {
        (self.b - self.a) / 3.0
    }
}

impl Objective for EnergyDistanceUniform {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        check_dim(1, mu)?;
        let n = mu.n();
        let (w, pw) = sorted_with_prefix(mu.rows().map(|r| r[0]));
        let mut cross = 0.0;
        for &x in &w {
            cross += self.mean_abs(x);
        }
        let self_w = cross_abs_sum(&w, &w, &pw);
        Ok(2.0 * cross / n as f64 - self_w / (n * n) as f64 - self.target_self_mean())
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        check_dim(1, mu)?;
        let n = mu.n();
        let (w, _) = sorted_with_prefix(mu.rows().map(|r| r[0]));
        let mut g = Gradient::zeros(n, 1);
        for (i, row) in mu.rows().enumerate() {
            let x = row[0];
            g.row_mut(i)[0] = 2.0 * self.mean_abs_slope(x) / n as f64
                - 2.0 * signed_rank(&w, x) / (n * n) as f64;
        }
        Ok(g)
    }

    fn regularity(&self) -> Regularity {
        Regularity { lambda: Some(0.0), smoothness: None, lipschitz: Some(2.0), star_convex: true }
    }
}
