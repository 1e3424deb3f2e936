//! Frank-Wolfe over probability measures on a fixed one-dimensional grid.
//!
//! Each step mixes the current atomic measure toward the grid point that
//! minimizes the first-variation potential, with the classical 2/(k+2) step
//! capped by exact line search (the restriction of the objective to the
//! segment is a quadratic in the mixing weight), so recorded values never
//! increase. Support grows by at most one atom per step.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::measure::SparseMeasure;
use crate::objectives::{EnergyDistance, EnergyDistanceUniform, Objective};
use crate::optim::{run_batch, BatchInit, BatchOptions, RunOptions};

/// Objective with a closed form on weighted atoms of the line.
///
/// `weighted_value` evaluates F at sum_a q_a delta_{x_a}; `potential` is the
/// first variation F'(mu)(x), the derivative of F((1-g) mu + g delta_x) in g
/// at 0 up to the constant -<F'(mu), mu>. Callers pass atoms sorted
/// ascending; results are deterministic for a fixed order.
pub trait AtomicObjective {
    fn weighted_value(&self, atoms: &[f64], weights: &[f64]) -> f64;
    fn potential(&self, atoms: &[f64], weights: &[f64], x: f64) -> f64;
}

impl AtomicObjective for EnergyDistance {
    fn weighted_value(&self, atoms: &[f64], weights: &[f64]) -> f64 {
        debug_assert_eq!(atoms.len(), weights.len());
        let mut attract = 0.0;
        for (&x, &q) in atoms.iter().zip(weights) {
            attract += q * self.mean_abs_to_target(x);
        }
        2.0 * attract - pair_energy(atoms, weights) - self.target_self_mean()
    }

    fn potential(&self, atoms: &[f64], weights: &[f64], x: f64) -> f64 {
        2.0 * self.mean_abs_to_target(x) - 2.0 * weighted_abs_sum(atoms, weights, x)
    }
}

impl AtomicObjective for EnergyDistanceUniform {
    fn weighted_value(&self, atoms: &[f64], weights: &[f64]) -> f64 {
        debug_assert_eq!(atoms.len(), weights.len());
        let mut attract = 0.0;
        for (&x, &q) in atoms.iter().zip(weights) {
            attract += q * self.mean_abs(x);
        }
        2.0 * attract - pair_energy(atoms, weights) - self.target_self_mean()
    }

    fn potential(&self, atoms: &[f64], weights: &[f64], x: f64) -> f64 {
        2.0 * self.mean_abs(x) - 2.0 * weighted_abs_sum(atoms, weights, x)
    }
}

/// sum_{a,b} q_a q_b |x_a - x_b| over all ordered pairs.
fn pair_energy(atoms: &[f64], weights: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (i, (&xi, &qi)) in atoms.iter().zip(weights).enumerate() {
        for (&xj, &qj) in atoms.iter().zip(weights).take(i) {
            acc += 2.0 * qi * qj * (xi - xj).abs();
        }
    }
    acc
}

fn weighted_abs_sum(atoms: &[f64], weights: &[f64], x: f64) -> f64 {
    let mut acc = 0.0;
    for (&xa, &qa) in atoms.iter().zip(weights) {
        acc += qa * (x - xa).abs();
    }
    acc
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl GridDomain {
    pub fn validate(&self) -> Result<()> {
        if !self.lo.is_finite() || !self.hi.is_finite() || !(self.lo < self.hi) {
            return Err(Error::invalid(format!("grid needs lo < hi, got [{}, {}]", self.lo, self.hi)));
        }
        if self.points < 2 {
            return Err(Error::invalid("grid needs at least two points"));
        }
        Ok(())
    }

    pub fn x(&self, g: usize) -> f64 {
        self.lo + (self.hi - self.lo) * g as f64 / (self.points - 1) as f64
    }
}

#[derive(Debug, Clone)]
pub struct FwOptions {
    pub steps: usize,
    /// Cap the 2/(k+2) step by the segment minimizer; keeps values monotone.
    pub line_search_cap: bool,
    /// Steps after which to snapshot the atom set (0 = the initial atom).
    pub snapshot_at: Vec<usize>,
}

impl FwOptions {
    pub fn new(steps: usize) -> Self {
        FwOptions { steps, line_search_cap: true, snapshot_at: Vec::new() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FwTracePoint {
    pub k: usize,
    pub gamma: f64,
    pub value: f64,
    pub support: usize,
    pub chosen_x: f64,
}

#[derive(Debug, Clone)]
pub struct FrankWolfeRun {
    /// Final (position, weight) atoms, ascending in position.
    pub atoms: Vec<(f64, f64)>,
    /// trace[k] is the state after k steps; trace[0] is the initial atom.
    pub trace: Vec<FwTracePoint>,
    pub snapshots: Vec<(usize, Vec<(f64, f64)>)>,
    pub grid: GridDomain,
}

impl FrankWolfeRun {
    /// Round the final measure to n equally weighted atoms by quantiles.
    pub fn to_uniform(&self, n: usize) -> Result<SparseMeasure> {
        quantile_round(&self.atoms, n)
    }
}

/// n equal atoms at the quantiles (j + 1/2)/n of a weighted atom set.
pub fn quantile_round(atoms: &[(f64, f64)], n: usize) -> Result<SparseMeasure> {
    if atoms.is_empty() || n == 0 {
        return Err(Error::invalid("quantile rounding needs atoms and n >= 1"));
    }
    let total: f64 = atoms.iter().map(|&(_, q)| q).sum();
    if !(total > 0.0) {
        return Err(Error::invalid("quantile rounding needs positive total weight"));
    }
    let mut rows = Vec::with_capacity(n);
    let mut cursor = 0usize;
    let mut cum = atoms[0].1;
    for j in 0..n {
        let want = (j as f64 + 0.5) / n as f64 * total;
        while cum < want && cursor + 1 < atoms.len() {
            cursor += 1;
            cum += atoms[cursor].1;
        }
        rows.push(vec![atoms[cursor].0]);
    }
    SparseMeasure::new(rows)
}

pub fn frank_wolfe<O: AtomicObjective + Sync>(
    obj: &O,
    grid: &GridDomain,
    opts: &FwOptions,
) -> Result<FrankWolfeRun> {
    grid.validate()?;
    let (g0, _) = exec::argmin_indexed(grid.points, |g| {
        let x = grid.x(g);
        obj.weighted_value(&[x], &[1.0])
    });
    let mut atoms: BTreeMap<usize, f64> = BTreeMap::new();
    atoms.insert(g0, 1.0);

    let mut xs: Vec<f64> = vec![grid.x(g0)];
    let mut qs: Vec<f64> = vec![1.0];
    let mut value = obj.weighted_value(&xs, &qs);
    let mut trace =
        vec![FwTracePoint { k: 0, gamma: 0.0, value, support: 1, chosen_x: grid.x(g0) }];
    let mut snapshots = Vec::new();
    if opts.snapshot_at.contains(&0) {
        snapshots.push((0, zip_atoms(&xs, &qs)));
    }

    for k in 1..=opts.steps {
        let (g_new, p_new) = {
            let xs = &xs;
            let qs = &qs;
            exec::argmin_indexed(grid.points, |g| obj.potential(xs, qs, grid.x(g)))
        };
        let x_new = grid.x(g_new);

        let gamma_fixed = 2.0 / (k as f64 + 2.0);
        let gamma = if opts.line_search_cap {
            // F along the segment toward delta_x is value + g1 t + q t^2.
            let mut mean_potential = 0.0;
            for (&xa, &qa) in xs.iter().zip(&qs) {
                mean_potential += qa * obj.potential(&xs, &qs, xa);
            }
            let g1 = p_new - mean_potential;
            let q = 2.0 * weighted_abs_sum(&xs, &qs, x_new) - pair_energy(&xs, &qs);
            let cap = if q > 0.0 {
                (-g1 / (2.0 * q)).clamp(0.0, 1.0)
            } else if g1 < 0.0 {
                1.0
            } else {
                0.0
            };
            gamma_fixed.min(cap)
        } else {
            gamma_fixed
        };

        if gamma > 0.0 {
            for w in atoms.values_mut() {
                *w *= 1.0 - gamma;
            }
            *atoms.entry(g_new).or_insert(0.0) += gamma;
            xs = atoms.keys().map(|&g| grid.x(g)).collect();
            qs = atoms.values().copied().collect();
            value = obj.weighted_value(&xs, &qs);
        }
        trace.push(FwTracePoint { k, gamma, value, support: atoms.len(), chosen_x: x_new });
        if opts.snapshot_at.contains(&k) {
            snapshots.push((k, zip_atoms(&xs, &qs)));
        }
    }

    Ok(FrankWolfeRun { atoms: zip_atoms(&xs, &qs), trace, snapshots, grid: *grid })
}

fn zip_atoms(xs: &[f64], qs: &[f64]) -> Vec<(f64, f64)> {
    xs.iter().copied().zip(qs.iter().copied()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub error: f64,
    pub error_fw: f64,
    pub error_pgd: f64,
}

#[derive(Debug, Clone)]
pub struct SweepPgd {
    pub runs: usize,
    pub base_seed: u64,
    pub run: RunOptions,
}

/// Best objective value reachable with n atoms, for each n: the Frank-Wolfe
/// value after n - 1 steps, against a descent polish started from that
/// state rounded to n equal atoms. One Frank-Wolfe run serves every n via
/// snapshots.
pub fn approximation_error_sweep<O: AtomicObjective + Objective>(
    obj: &O,
    grid: &GridDomain,
    ns: &[usize],
    pgd: &SweepPgd,
) -> Result<Vec<SweepRow>> {
    if ns.is_empty() {
        return Err(Error::invalid("sweep needs at least one size"));
    }
    for pair in ns.windows(2) {
        if pair[0] >= pair[1] {
            return Err(Error::invalid("sweep sizes must be strictly increasing"));
        }
    }
    if ns[0] == 0 {
        return Err(Error::invalid("sweep sizes must be at least 1"));
    }
    if pgd.runs == 0 {
        return Err(Error::invalid("sweep needs at least one polish run"));
    }
    let steps = ns.last().unwrap() - 1;
    let mut fw_opts = FwOptions::new(steps);
    fw_opts.snapshot_at = ns.iter().map(|&n| n - 1).collect();
    let fw = frank_wolfe(obj, grid, &fw_opts)?;

    let mut rows = Vec::with_capacity(ns.len());
    for (idx, &n) in ns.iter().enumerate() {
        let error_fw = fw.trace[n - 1].value;
        let snap = &fw.snapshots.iter().find(|(k, _)| *k == n - 1).expect("snapshot requested").1;
        let init = quantile_round(snap, n)?;
        let batch = BatchOptions {
            runs: pgd.runs,
            base_seed: pgd.base_seed + (idx * pgd.runs) as u64,
            init: BatchInit::Fixed(init),
            run: pgd.run.clone(),
        };
        let polish = run_batch(obj, &batch)?;
        let error_pgd =
            polish.per_run.iter().map(|r| r.best_f).sum::<f64>() / pgd.runs as f64;
        rows.push(SweepRow { n, error: error_fw.min(error_pgd), error_fw, error_pgd });
    }
    Ok(rows)
}
