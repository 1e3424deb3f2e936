//! Quadratic well: F(mu) = sum_i ||w_i - c||^2.
//!
//! Every regularity constant is exact (lambda = smoothness = 2), which makes
//! this the calibration fixture for the inequality checkers and the
//! contraction gate: one gradient step with gamma moves each particle to
//! c + (1 - 2 gamma)(w_i - c).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{lex_order, sq_dist, SparseMeasure};

use super::{check_dim, Gradient, Objective, Regularity};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadraticWell {
    center: Vec<f64>,
}

impl QuadraticWell {
    pub fn new(center: Vec<f64>) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::invalid("center must have dimension >= 1"));
        }
        if !center.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFinite { context: "quadratic well center" });
        }
        Ok(QuadraticWell { center })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl Objective for QuadraticWell {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        check_dim(self.dim(), mu)?;
        let order = lex_order(mu);
        let mut acc = 0.0;
        for &i in &order {
            acc += sq_dist(mu.particle(i), &self.center);
        }
        Ok(acc)
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        check_dim(self.dim(), mu)?;
        let d = self.dim();
        let mut g = Gradient::zeros(mu.n(), d);
        for (i, w) in mu.rows().enumerate() {
            let row = g.row_mut(i);
            for l in 0..d {
                row[l] = 2.0 * (w[l] - self.center[l]);
            }
        }
        Ok(g)
    }

    fn regularity(&self) -> Regularity {
        Regularity {
            lambda: Some(2.0),
            smoothness: Some(2.0),
            lipschitz: None,
            star_convex: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_and_gradient_at_offset() {
        let well = QuadraticWell::new(vec![1.0, -1.0]).unwrap();
        let mu = SparseMeasure::new(vec![vec![2.0, 0.0], vec![1.0, -1.0]]).unwrap();
        assert_eq!(well.value(&mu).unwrap(), 2.0);
        let g = well.gradient(&mu).unwrap();
        assert_eq!(g.row(0), &[2.0, 2.0]);
        assert_eq!(g.row(1), &[0.0, 0.0]);
    }

    #[test]
    fn declared_constants_are_consistent() {
        let well = QuadraticWell::new(vec![0.0]).unwrap();
        let reg = well.regularity();
        assert!(reg.is_consistent());
        assert_eq!(reg.lambda, Some(2.0));
        assert_eq!(reg.smoothness, Some(2.0));
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let well = QuadraticWell::new(vec![0.0, 0.0]).unwrap();
        let mu = SparseMeasure::new(vec![vec![1.0]]).unwrap();
        assert!(well.value(&mu).is_err());
    }
}
