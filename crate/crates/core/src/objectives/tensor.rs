//! Cubic-form objective for recovering an orthonormal frame.
//!
//! For an orthonormal set {v_1..v_n} in R^d the objective is
//! G(mu) = -sum_j sum_i <v_i, w_j / |w_j|>^3. The minimum over unit
//! particles is -n, attained when every particle sits on some +v_i
//! (particles may share a direction; the value does not require the map
//! to be one-to-one). Particles at or numerically near the origin have
//! no defined direction and are rejected.

use crate::error::{Error, Result};
use crate::exec;
use crate::measure::{lex_order, SparseMeasure};

use super::{check_dim, Gradient, Objective, Regularity};

const ORTHONORMALITY_TOL: f64 = 1e-10;
const MIN_NORM_SQ: f64 = 1e-24;

#[derive(Debug, Clone)]
pub struct TensorObjective {
    /// Row-major basis vectors, n_basis rows of length d.
    basis: Vec<Vec<f64>>,
    d: usize,
}

impl TensorObjective {
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        if basis.is_empty() {
            return Err(Error::invalid("basis must contain at least one vector"));
        }
        let d = basis[0].len();
        if d == 0 {
            return Err(Error::invalid("basis vectors must be non-empty"));
        }
        if basis.len() > d {
            return Err(Error::invalid(format!(
                "cannot have {} orthonormal vectors in dimension {d}",
                basis.len()
            )));
        }
        for v in &basis {
            if v.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite { context: "basis vector" });
            }
        }
        for i in 0..basis.len() {
            for j in i..basis.len() {
                let dot: f64 = basis[i].iter().zip(&basis[j]).map(|(a, b)| a * b).sum();
                let want = if i == j { 1.0 } else { 0.0 };
                if (dot - want).abs() > ORTHONORMALITY_TOL {
                    return Err(Error::invalid(format!(
                        "basis not orthonormal: <v{i}, v{j}> = {dot}"
                    )));
                }
            }
        }
        Ok(TensorObjective { basis, d })
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn n_basis(&self) -> usize {
        self.basis.len()
    }

    fn check_measure(&self, mu: &SparseMeasure) -> Result<()> {
        check_dim(self.d, mu)?;
        if mu.n() != self.basis.len() {
            return Err(Error::SizeMismatch { left: mu.n(), right: self.basis.len() });
        }
        Ok(())
    }

    fn unit_direction(&self, mu: &SparseMeasure, j: usize) -> Result<(Vec<f64>, f64)> {
        let w = mu.particle(j);
        let norm_sq: f64 = w.iter().map(|x| x * x).sum();
        if norm_sq <= MIN_NORM_SQ {
            return Err(Error::ZeroNormParticle { index: j });
        }
        let r = norm_sq.sqrt();
        Ok((w.iter().map(|x| x / r).collect(), r))
    }

    /// For each particle: index of the nearest signed basis vector and the
    /// distance from the particle's direction to it.
    pub fn nearest_signed_basis(&self, mu: &SparseMeasure) -> Result<Vec<(usize, f64)>> {
        self.check_measure(mu)?;
        (0..mu.n())
            .map(|j| {
                let (u, _) = self.unit_direction(mu, j)?;
                let mut best = (0usize, f64::INFINITY);
                for (i, v) in self.basis.iter().enumerate() {
                    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                    // |u - sign(dot) v|^2 = 2 - 2|dot|.
                    let dist = (2.0 - 2.0 * dot.abs()).max(0.0).sqrt();
                    if dist < best.1 {
                        best = (i, dist);
                    }
                }
                Ok(best)
            })
            .collect()
    }

    /// Largest distance from any particle direction to its nearest signed
    /// basis vector.
    pub fn recovery_distance(&self, mu: &SparseMeasure) -> Result<f64> {
        let per = self.nearest_signed_basis(mu)?;
        Ok(per.into_iter().fold(0.0f64, |acc, (_, dist)| acc.max(dist)))
    }
}

impl Objective for TensorObjective {
    fn dim(&self) -> usize {
        self.d
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        self.check_measure(mu)?;
        let order = lex_order(mu);
        let mut total = 0.0;
        for &j in &order {
            let (u, _) = self.unit_direction(mu, j)?;
            for v in &self.basis {
                let c: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                total -= c * c * c;
            }
        }
        Ok(total)
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        self.check_measure(mu)?;
        let n = mu.n();
        let d = self.d;
        let rows: Vec<Result<Vec<f64>>> = exec::map_indexed(n, |j| {
            let (u, r) = self.unit_direction(mu, j)?;
            let mut row = vec![0.0; d];
            let mut s = 0.0;
            for v in &self.basis {
                let c: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
                s += c * c * c;
                for l in 0..d {
                    row[l] += c * c * v[l];
                }
            }
            // d/dw of -sum_i <v_i, w/|w|>^3 via the chain rule through w/|w|.
            for l in 0..d {
                row[l] = -(3.0 / r) * (row[l] - s * u[l]);
            }
            Ok(row)
        });
        let mut data = Vec::with_capacity(n * d);
        for row in rows {
            data.extend_from_slice(&row?);
        }
        Ok(Gradient::from_flat(n, d, data))
    }

    fn regularity(&self) -> Regularity {
        Regularity::none()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn axes(d: usize) -> Vec<Vec<f64>> {
        (0..d)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                v
            })
            .collect()
    }

    #[test]
    fn minimum_at_the_basis_itself() {
        let obj = TensorObjective::new(axes(4)).unwrap();
        let mu = SparseMeasure::new(axes(4)).unwrap();
        assert_eq!(obj.value(&mu).unwrap(), -4.0);
        assert!(obj.gradient(&mu).unwrap().norm_sq() < 1e-24);
        assert_eq!(obj.recovery_distance(&mu).unwrap(), 0.0);
    }

    #[test]
    fn clustered_particles_also_reach_the_minimum() {
        let obj = TensorObjective::new(axes(3)).unwrap();
        let mu = SparseMeasure::from_flat(
            3,
            3,
            vec![1.0, 0.0, 0.0, 1.0, 1e-13, 0.0, 1.0, 0.0, 1e-13],
        )
        .unwrap();
        assert!((obj.value(&mu).unwrap() + 3.0).abs() < 1e-9);
    }

    #[test]
    fn scale_invariant_in_each_particle() {
        let obj = TensorObjective::new(axes(2)).unwrap();
        let a = SparseMeasure::new(vec![vec![3.0, 4.0], vec![-1.0, 2.0]]).unwrap();
        let b = SparseMeasure::new(vec![vec![0.6, 0.8], vec![-0.5, 1.0]]).unwrap();
        assert!((obj.value(&a).unwrap() - obj.value(&b).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn negated_basis_directions_are_maxima_of_each_term() {
        let obj = TensorObjective::new(axes(2)).unwrap();
        let mu = SparseMeasure::new(vec![vec![-1.0, 0.0], vec![0.0, -1.0]]).unwrap();
        assert_eq!(obj.value(&mu).unwrap(), 2.0);
    }

    #[test]
    fn rejects_bad_bases_and_zero_particles() {
        assert!(TensorObjective::new(vec![vec![1.0, 0.0], vec![1.0, 0.0]]).is_err());
        assert!(TensorObjective::new(vec![vec![0.5, 0.0]]).is_err());
        assert!(TensorObjective::new(vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, 0.0]]).is_err());
        let obj = TensorObjective::new(axes(2)).unwrap();
        let mu = SparseMeasure::from_flat(2, 2, vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(obj.value(&mu), Err(Error::ZeroNormParticle { index: 0 })));
    }

    #[test]
    fn gradient_matches_a_one_dimensional_slice() {
        // Single particle in d=2 at angle t: value = -(cos^3 t + sin^3 t).
        let obj = TensorObjective::new(axes(2)).unwrap();
        let t = 0.7f64;
        let mu = SparseMeasure::new(vec![vec![t.cos(), t.sin()], vec![2.0, 0.0]]).unwrap();
        let grad = obj.gradient(&mu).unwrap();
        // Tangential derivative along the circle.
        let analytic = -(3.0 * t.cos() * t.cos() * (-t.sin()) + 3.0 * t.sin() * t.sin() * t.cos());
        let tangent = [-t.sin(), t.cos()];
        let projected = grad.row(0)[0] * tangent[0] + grad.row(0)[1] * tangent[1];
        assert!((projected - analytic).abs() < 1e-12);
    }
}
