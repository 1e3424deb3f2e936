//! Squared maximum mean discrepancy to a fixed target sample.
//!
//! MMD^2(mu, nu) = mean K(w, w') - 2 mean K(w, v) + mean K(v, v'), with the
//! kernel means taken over all ordered pairs (diagonal included, matching the
//! product-measure integrals). With the negative-distance kernel this equals
//! the energy distance. Target particles are stored in canonical order at
//! construction, so MMD^2(nu, nu) is exactly zero.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::exec;
use crate::measure::{lex_order, sq_dist, SparseMeasure};

use super::{check_dim, Gradient, Objective, Regularity};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Kernel {
    Gaussian { bandwidth: f64 },
    Laplacian { bandwidth: f64 },
    NegativeDistance,
}

impl Kernel {
    fn validate(&self) -> Result<()> {
        match *self {
            Kernel::Gaussian { bandwidth } | Kernel::Laplacian { bandwidth } => {
                if !(bandwidth > 0.0) || !bandwidth.is_finite() {
                    return Err(crate::error::Error::invalid(format!(
                        "kernel bandwidth must be positive and finite, got {bandwidth}"
                    )));
                }
            }
            Kernel::NegativeDistance => {}
        }
        Ok(())
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        let d2 = sq_dist(x, y);
        match *self {
            Kernel::Gaussian { bandwidth } => (-d2 / (2.0 * bandwidth * bandwidth)).exp(),
            Kernel::Laplacian { bandwidth } => (-d2.sqrt() / bandwidth).exp(),
            Kernel::NegativeDistance => -d2.sqrt(),
        }
    }

    /// d/dx K(x, y), written into `out`. At x = y the nonsmooth kernels take
    /// the zero subgradient.
    pub fn grad_x(&self, x: &[f64], y: &[f64], out: &mut [f64]) {
        let d2 = sq_dist(x, y);
        match *self {
            Kernel::Gaussian { bandwidth } => {
                let h2 = bandwidth * bandwidth;
                let k = (-d2 / (2.0 * h2)).exp();
                for (o, (a, b)) in out.iter_mut().zip(x.iter().zip(y)) {
                    *o = -k * (a - b) / h2;
                }
            }
            Kernel::Laplacian { bandwidth } => {
                let dist = d2.sqrt();
                if dist == 0.0 {
                    out.fill(0.0);
                } else {
                    let k = (-dist / bandwidth).exp();
                    for (o, (a, b)) in out.iter_mut().zip(x.iter().zip(y)) {
                        *o = -k * (a - b) / (bandwidth * dist);
                    }
                }
            }
            Kernel::NegativeDistance => {
                let dist = d2.sqrt();
                if dist == 0.0 {
                    out.fill(0.0);
                } else {
                    for (o, (a, b)) in out.iter_mut().zip(x.iter().zip(y)) {
                        *o = -(a - b) / dist;
                    }
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct MmdObjective {
    kernel: Kernel,
    /// Target particles in canonical order.
    target: SparseMeasure,
    /// mean K(v, v') over all ordered target pairs.
    target_self: f64,
}

impl MmdObjective {
    pub fn new(kernel: Kernel, target: &SparseMeasure) -> Result<Self> {
        kernel.validate()?;
        let order = lex_order(target);
        let rows: Vec<Vec<f64>> = order.iter().map(|&i| target.particle(i).to_vec()).collect();
        let target = SparseMeasure::new(rows)?;
        let target_self = kernel_mean(&kernel, &target, &target);
        Ok(MmdObjective { kernel, target, target_self })
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn target(&self) -> &SparseMeasure {
        &self.target
    }

    /// RKHS norm of the mean embedding, sqrt(mean K(w, w')).
    pub fn embedding_norm(&self, mu: &SparseMeasure) -> Result<f64> {
        check_dim(self.target.dim(), mu)?;
        let order = lex_order(mu);
        Ok(ordered_kernel_mean(&self.kernel, mu, &order, mu, &order).max(0.0).sqrt())
    }
}

/// mean_{i,j} K(a_i, b_j) with both sides visited in canonical order.
fn kernel_mean(kernel: &Kernel, a: &SparseMeasure, b: &SparseMeasure) -> f64 {
    let oa = lex_order(a);
    let ob = lex_order(b);
    ordered_kernel_mean(kernel, a, &oa, b, &ob)
}

fn ordered_kernel_mean(
    kernel: &Kernel,
    a: &SparseMeasure,
    oa: &[usize],
    b: &SparseMeasure,
    ob: &[usize],
) -> f64 {
    let rows = exec::map_indexed(oa.len(), |r| {
        let x = a.particle(oa[r]);
        let mut acc = 0.0;
        for &j in ob {
            acc += kernel.eval(x, b.particle(j));
        }
        acc
    });
    rows.iter().sum::<f64>() / (oa.len() * ob.len()) as f64
}

impl Objective for MmdObjective {
    fn dim(&self) -> usize {
        self.target.dim()
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        check_dim(self.dim(), mu)?;
        let order = lex_order(mu);
        let target_order: Vec<usize> = (0..self.target.n()).collect();
        let self_term = ordered_kernel_mean(&self.kernel, mu, &order, mu, &order);
        let cross = ordered_kernel_mean(&self.kernel, mu, &order, &self.target, &target_order);
        Ok(self_term - 2.0 * cross + self.target_self)
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        check_dim(self.dim(), mu)?;
        let n = mu.n();
        let m = self.target.n();
        let d = self.dim();
        let order = lex_order(mu);
        let rows: Vec<Vec<f64>> = exec::map_indexed(n, |i| {
            let x = mu.particle(i);
            let mut row = vec![0.0; d];
            let mut tmp = vec![0.0; d];
            // Symmetry of the kernel doubles the self-interaction term.
            let self_scale = 2.0 / (n * n) as f64;
            for &j in &order {
                self.kernel.grad_x(x, mu.particle(j), &mut tmp);
                for l in 0..d {
                    row[l] += self_scale * tmp[l];
                }
            }
            let cross_scale = -2.0 / (n * m) as f64;
            for j in 0..m {
                self.kernel.grad_x(x, self.target.particle(j), &mut tmp);
                for l in 0..d {
                    row[l] += cross_scale * tmp[l];
                }
            }
            row
        });
        let mut data = Vec::with_capacity(n * d);
        for row in rows {
            data.extend_from_slice(&row);
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

    fn m(rows: &[&[f64]]) -> SparseMeasure {
        SparseMeasure::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn zero_at_the_target_exactly() {
        let target = m(&[&[0.4, 0.1], &[-0.2, 0.9], &[0.5, 0.5]]);
        for kernel in [
            Kernel::Gaussian { bandwidth: 0.7 },
            Kernel::Laplacian { bandwidth: 1.3 },
            Kernel::NegativeDistance,
        ] {
            let obj = MmdObjective::new(kernel, &target).unwrap();
            assert_eq!(obj.value(&target).unwrap(), 0.0);
        }
    }

    #[test]
    fn matches_naive_three_sum_form() {
        let target = m(&[&[0.0], &[0.5], &[1.25]]);
        let mu = m(&[&[-0.3], &[0.4], &[0.9]]);
        let kernel = Kernel::Gaussian { bandwidth: 0.8 };
        let obj = MmdObjective::new(kernel, &target).unwrap();
        let naive = {
            let k = |a: &SparseMeasure, b: &SparseMeasure| -> f64 {
                let mut acc = 0.0;
                for x in a.rows() {
                    for y in b.rows() {
                        acc += kernel.eval(x, y);
                    }
                }
                acc / (a.n() * b.n()) as f64
            };
            k(&mu, &mu) - 2.0 * k(&mu, &target) + k(&target, &target)
        };
        assert!((obj.value(&mu).unwrap() - naive).abs() < 1e-12);
    }

    #[test]
    fn allows_different_particle_counts() {
        let target = m(&[&[0.0], &[1.0], &[2.0], &[3.0]]);
        let obj = MmdObjective::new(Kernel::Gaussian { bandwidth: 1.0 }, &target).unwrap();
        let mu = m(&[&[0.5], &[2.5]]);
        assert!(obj.value(&mu).unwrap() > 0.0);
        assert_eq!(obj.gradient(&mu).unwrap().n(), 2);
    }

    #[test]
    fn bandwidth_must_be_positive() {
        let target = m(&[&[0.0]]);
        assert!(MmdObjective::new(Kernel::Gaussian { bandwidth: 0.0 }, &target).is_err());
    }
}
