//! Optimal transport between two measures with the same particle count.
//!
//! With uniform weights the optimal coupling is a permutation sigma minimizing
//! sum_i ||w_i - v_sigma(i)||^2. The squared cost is reported unnormalized
//! (no 1/n factor). In one dimension the optimum is the monotone
//! rearrangement obtained by sorting; in higher dimensions an exact
//! shortest-augmenting-path assignment solver runs in O(n^3).

use crate::error::{Error, Result};
use crate::exec;
use crate::measure::{lex_order, sq_dist, SparseMeasure};

#[derive(Debug, Clone, PartialEq)]
pub struct TransportPlan {
    /// `permutation[i]` is the target particle index matched to source i.
    pub permutation: Vec<usize>,
    /// Unnormalized squared cost sum_i ||w_i - v_perm(i)||^2.
    pub squared_cost: f64,
}

fn check_compat(mu: &SparseMeasure, nu: &SparseMeasure) -> Result<()> {
    if mu.dim() != nu.dim() {
        return Err(Error::DimensionMismatch { expected: mu.dim(), got: nu.dim() });
    }
    if mu.n() != nu.n() {
        return Err(Error::SizeMismatch { left: mu.n(), right: nu.n() });
    }
    Ok(())
}

/// Cost of a given pairing, accumulated in canonical (lexicographic source)
/// order so the value does not depend on particle storage order.
pub(crate) fn pairing_cost(mu: &SparseMeasure, nu: &SparseMeasure, perm: &[usize]) -> f64 {
    let order = lex_order(mu);
    let mut acc = 0.0;
    for &i in &order {
        acc += sq_dist(mu.particle(i), nu.particle(perm[i]));
    }
    acc
}

pub fn optimal_plan(mu: &SparseMeasure, nu: &SparseMeasure) -> Result<TransportPlan> {
    check_compat(mu, nu)?;
    let perm = if mu.dim() == 1 { monotone_pairing(mu, nu) } else { assignment_pairing(mu, nu) };
    let squared_cost = pairing_cost(mu, nu, &perm);
    Ok(TransportPlan { permutation: perm, squared_cost })
}

/// General assignment path regardless of dimension; the 1-D fast path must
/// agree with this exactly.
pub(crate) fn optimal_plan_general(mu: &SparseMeasure, nu: &SparseMeasure) -> Result<TransportPlan> {
    check_compat(mu, nu)?;
    let perm = assignment_pairing(mu, nu);
    let squared_cost = pairing_cost(mu, nu, &perm);
    Ok(TransportPlan { permutation: perm, squared_cost })
}

pub fn w2_squared(mu: &SparseMeasure, nu: &SparseMeasure) -> Result<f64> {
    Ok(optimal_plan(mu, nu)?.squared_cost)
}

/// Particle-wise interpolation (1-t) w_i + t v_sigma(i) along the optimal
/// plan. Values of t outside [0, 1] by at most 1e-12 are clamped; anything
/// further out is rejected.
pub fn displacement_interpolate(
    mu: &SparseMeasure,
    nu: &SparseMeasure,
    t: f64,
) -> Result<SparseMeasure> {
    if !(-1e-12..=1.0 + 1e-12).contains(&t) {
        return Err(Error::InterpolationOutOfRange(t));
    }
    let t = t.clamp(0.0, 1.0);
    let plan = optimal_plan(mu, nu)?;
    let d = mu.dim();
    let mut data = Vec::with_capacity(mu.n() * d);
    for (i, w) in mu.rows().enumerate() {
        let v = nu.particle(plan.permutation[i]);
        for l in 0..d {
            data.push((1.0 - t) * w[l] + t * v[l]);
        }
    }
    SparseMeasure::from_flat(mu.n(), d, data)
}

/// 1-D optimum: sort both sides and pair by rank. Stable sorts break ties by
/// the lower original index.
fn monotone_pairing(mu: &SparseMeasure, nu: &SparseMeasure) -> Vec<usize> {
    let argsort = |m: &SparseMeasure| {
        let mut idx: Vec<usize> = (0..m.n()).collect();
        idx.sort_by(|&a, &b| m.particle(a)[0].partial_cmp(&m.particle(b)[0]).unwrap());
        idx
    };
    let iw = argsort(mu);
    let iv = argsort(nu);
    let mut perm = vec![0usize; mu.n()];
    for r in 0..mu.n() {
        perm[iw[r]] = iv[r];
    }
    perm
}

fn assignment_pairing(mu: &SparseMeasure, nu: &SparseMeasure) -> Vec<usize> {
    let n = mu.n();
    let cost: Vec<f64> = exec::map_indexed(n, |i| {
        let wi = mu.particle(i);
        (0..n).map(|j| sq_dist(wi, nu.particle(j))).collect::<Vec<f64>>()
    })
    .into_iter()
    .flatten()
    .collect();
    assignment(&cost, n)
}

/// Exact minimal assignment on a dense n x n cost matrix via shortest
/// augmenting paths with dual potentials. Ties resolve to the lowest column
/// index, so the result is deterministic.
fn assignment(cost: &[f64], n: usize) -> Vec<usize> {
    let mut u = vec![0.0f64; n + 1];
    let mut v = vec![0.0f64; n + 1];
    // p[j]: 1-based row matched to column j; column 0 is a sentinel.
    let mut p = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        p[0] = i;
        let mut j0 = 0usize;
        let mut minv = vec![f64::INFINITY; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = p[j0];
            let mut delta = f64::INFINITY;
            let mut j1 = 0usize;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if p[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut row_to_col = vec![0usize; n];
    for j in 1..=n {
        if p[j] > 0 {
            row_to_col[p[j] - 1] = j - 1;
        }
    }
    row_to_col
}
