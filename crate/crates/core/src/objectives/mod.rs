//! Objective functionals over sparse measures.
//!
//! Each objective evaluates a scalar F(mu) and a per-particle gradient field
//! on n x d measures. Values accumulate in a canonical particle order, so
//! they are bitwise invariant under particle permutation; gradients are
//! computed per particle from order-independent quantities, so they are
//! exactly equivariant. At kinks of the nonsmooth objectives the subgradient
//! convention is sign(0) = 0.

mod circle;
mod energy;
mod mmd;
mod quadratic;
mod tensor;
mod w2;

pub use circle::{circular_distance, CircleNet, CircleTarget};
pub use energy::{EnergyDistance, EnergyDistanceUniform};
pub use mmd::{Kernel, MmdObjective};
pub use quadratic::QuadraticWell;
pub use tensor::TensorObjective;
pub use w2::W2Objective;

use crate::error::{Error, Result};
use crate::measure::SparseMeasure;

/// Per-particle gradient field, stored like the measure it was taken at.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    n: usize,
    d: usize,
    data: Vec<f64>,
}

impl Gradient {
    pub fn from_flat(n: usize, d: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), n * d, "gradient buffer does not match n x d");
        Gradient { n, d, data }
    }

    pub fn zeros(n: usize, d: usize) -> Self {
        Gradient { n, d, data: vec![0.0; n * d] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Sum of squared entries over all particles.
    pub fn norm_sq(&self) -> f64 {
        self.data.iter().map(|g| g * g).sum()
    }
}

/// Regularity constants an objective declares about itself. `lambda` is the
/// displacement-convexity modulus, `smoothness` the gradient Lipschitz
/// constant, `lipschitz` the gradient bound of a nonsmooth objective. When
/// both `lambda` and `smoothness` are present, lambda <= smoothness.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularity {
    pub lambda: Option<f64>,
    pub smoothness: Option<f64>,
    pub lipschitz: Option<f64>,
    pub star_convex: bool,
}

impl Regularity {
    pub const fn none() -> Self {
        Regularity { lambda: None, smoothness: None, lipschitz: None, star_convex: false }
    }

    pub fn is_consistent(&self) -> bool {
        match (self.lambda, self.smoothness) {
            (Some(l), Some(s)) => l <= s,
            _ => true,
        }
    }
}

pub trait Objective: Send + Sync {
    /// Particle dimension this objective evaluates on.
    fn dim(&self) -> usize;

    fn value(&self, mu: &SparseMeasure) -> Result<f64>;

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient>;

    fn regularity(&self) -> Regularity;
}

pub(crate) fn check_dim(expected: usize, mu: &SparseMeasure) -> Result<()> {
    if mu.dim() != expected {
        return Err(Error::DimensionMismatch { expected, got: mu.dim() });
    }
    Ok(())
}

/// Particle values of a 1-D measure in ascending order, plus prefix sums
/// (prefix[k] = sum of the first k sorted values). The sorted view is the
/// canonical accumulation order for 1-D pairwise sums.
pub(crate) fn sorted_with_prefix(values: impl Iterator<Item = f64>) -> (Vec<f64>, Vec<f64>) {
    let mut sorted: Vec<f64> = values.collect();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut prefix = Vec::with_capacity(sorted.len() + 1);
    let mut acc = 0.0;
    prefix.push(0.0);
    for &x in &sorted {
        acc += x;
        prefix.push(acc);
    }
    (sorted, prefix)
}

/// sum_{i,k} |a_i - b_k| over all pairs, including coincident ones, using the
/// sorted form of b. O(|a| log |b|). Iterating `a_sorted` in ascending order
/// keeps the accumulation canonical.
pub(crate) fn cross_abs_sum(a_sorted: &[f64], b_sorted: &[f64], b_prefix: &[f64]) -> f64 {
    let m = b_sorted.len();
    let total = b_prefix[m];
    let mut acc = 0.0;
    for &x in a_sorted {
        // Number of b-values strictly below x.
        let below = b_sorted.partition_point(|&b| b < x);
        let below_sum = b_prefix[below];
        acc += x * below as f64 - below_sum + (total - below_sum) - x * (m - below) as f64;
    }
    acc
}

/// Count of values strictly below minus strictly above x; the exact value of
/// sum_k sign(x - b_k) with sign(0) = 0.
pub(crate) fn signed_rank(b_sorted: &[f64], x: f64) -> f64 {
    let below = b_sorted.partition_point(|&b| b < x);
    let above = b_sorted.len() - b_sorted.partition_point(|&b| b <= x);
    below as f64 - above as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cross_abs_sum_matches_naive() {
        let (a, _) = sorted_with_prefix([0.3, -1.0, 2.0, 0.3].into_iter());
        let (b, pb) = sorted_with_prefix([1.5, -0.5, 0.0].into_iter());
        let fast = cross_abs_sum(&a, &b, &pb);
        let naive: f64 =
            a.iter().flat_map(|x| b.iter().map(move |y| (x - y).abs())).sum();
        assert!((fast - naive).abs() < 1e-12);
    }

    #[test]
    fn signed_rank_uses_strict_counts() {
        let b = [0.0, 1.0, 1.0, 2.0];
        assert_eq!(signed_rank(&b, 1.0), 1.0 - 1.0);
        assert_eq!(signed_rank(&b, 0.5), 1.0 - 3.0);
        assert_eq!(signed_rank(&b, 3.0), 4.0);
        assert_eq!(signed_rank(&b, -1.0), -4.0);
    }
}
