//! Checks that an objective actually has the curvature and smoothness it
//! advertises, phrased as inequalities along optimal pairings.
//!
//! Every check returns a report of signed gaps, where a nonnegative gap means
//! the inequality held. Callers decide tolerances. The wrappers at the bottom
//! deliberately break an objective so test suites can confirm each check
//! rejects what it should.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measure::SparseMeasure;
use crate::objectives::{Gradient, Objective, Regularity};
use crate::optim::StepSchedule;
use crate::transport::{displacement_interpolate, optimal_plan, w2_squared};

/// Central-difference gradient, one coordinate at a time.
pub fn finite_difference_gradient(
    obj: &dyn Objective,
    mu: &SparseMeasure,
    step: f64,
) -> Result<Gradient> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::invalid(format!("finite difference step must be positive, got {step}")));
    }
    let n = mu.n();
    let d = mu.dim();
    let mut grad = Gradient::zeros(n, d);
    let mut probe = mu.clone();
    for i in 0..n {
        for l in 0..d {
            let idx = i * d + l;
            let orig = probe.as_slice()[idx];
            probe.as_mut_slice()[idx] = orig + step;
            let up = obj.value(&probe)?;
            probe.as_mut_slice()[idx] = orig - step;
            let dn = obj.value(&probe)?;
            probe.as_mut_slice()[idx] = orig;
            grad.row_mut(i)[l] = (up - dn) / (2.0 * step);
        }
    }
    Ok(grad)
}

fn resolve(name: &'static str, given: Option<f64>, meta: Option<f64>) -> Result<f64> {
    given.or(meta).ok_or(Error::MissingRegularity(name))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct JensenPoint {
    pub t: f64,
    /// F(mu_t) minus the chord bound; nonpositive when convexity holds.
    pub violation: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct JensenReport {
    pub lambda: f64,
    pub w2_sq: f64,
    pub points: Vec<JensenPoint>,
    pub max_violation: f64,
}

/// Compare F along displacement interpolation against the lambda-convex
/// chord F(mu_t) <= (1-t) F(mu) + t F(nu) - (lambda/2) t (1-t) W2^2.
pub fn check_displacement_jensen(
    obj: &dyn Objective,
    mu: &SparseMeasure,
    nu: &SparseMeasure,
    ts: &[f64],
    lambda: Option<f64>,
) -> Result<JensenReport> {
    let lambda = resolve("lambda", lambda, obj.regularity().lambda)?;
    let w2_sq = w2_squared(mu, nu)?;
    let f_mu = obj.value(mu)?;
    let f_nu = obj.value(nu)?;
    let mut points = Vec::with_capacity(ts.len());
    let mut max_violation = f64::NEG_INFINITY;
    for &t in ts {
        let mid = displacement_interpolate(mu, nu, t)?;
        let chord = (1.0 - t) * f_mu + t * f_nu - 0.5 * lambda * t * (1.0 - t) * w2_sq;
        let violation = obj.value(&mid)? - chord;
        max_violation = max_violation.max(violation);
        points.push(JensenPoint { t, violation });
    }
    if points.is_empty() {
        max_violation = 0.0;
    }
    Ok(JensenReport { lambda, w2_sq, points, max_violation })
}

#[derive(Debug, Clone, Serialize)]
pub struct StarReport {
    pub f_mu: f64,
    pub f_hat: f64,
    /// sum_i <grad_i, w_i - T(w_i)> along the optimal pairing to the anchor.
    pub inner: f64,
    /// inner - (F(mu) - F(hat)); nonnegative when the gradient inequality
    /// toward the anchor holds.
    pub margin: f64,
}

pub fn check_star_convexity(
    obj: &dyn Objective,
    mu: &SparseMeasure,
    hat: &SparseMeasure,
) -> Result<StarReport> {
    let plan = optimal_plan(mu, hat)?;
    let grad = obj.gradient(mu)?;
    let d = mu.dim();
    let mut inner = 0.0;
    for (i, w) in mu.rows().enumerate() {
        let t = hat.particle(plan.permutation[i]);
        let g = grad.row(i);
        for l in 0..d {
            inner += g[l] * (w[l] - t[l]);
        }
    }
    let f_mu = obj.value(mu)?;
    let f_hat = obj.value(hat)?;
    Ok(StarReport { f_mu, f_hat, inner, margin: inner - (f_mu - f_hat) })
}

#[derive(Debug, Clone, Serialize)]
pub struct SmoothnessReport {
    pub ell: f64,
    pub lambda: Option<f64>,
    pub w2_sq: f64,
    /// ell^2 W2^2 - sum_i |g_mu(i) - g_nu(sigma i)|^2.
    pub gradient_sq_gap: f64,
    /// ell W2^2 - sum_i |g_mu(i) - g_nu(sigma i)|, as sometimes stated;
    /// reported, not gated: it fails on scaling grounds alone.
    pub gradient_stated_gap: f64,
    /// min over particle pairs of ell |w_i - w_j| - |g_i - g_j| at mu;
    /// None for a single particle.
    pub pairwise_min_gap: Option<f64>,
    /// F(nu) - F(mu) - <g_mu, T - id> - (1/2 ell) sum |g_nu(sigma i) - g_mu(i)|^2.
    pub cocoercivity_gap: f64,
    /// <g_nu(sigma i) - g_mu(i), v_sigma(i) - w_i> - (1/ell) sum |...|^2,
    /// gradients coupled by the optimal pairing.
    pub coupling_gap_paired: f64,
    /// Same expression with gradients matched by raw index; reported only.
    pub coupling_gap_literal: f64,
    /// <g_mu - g_nu, w - v> minus (lambda ell/(lambda+ell)) W2^2 minus
    /// (1/(lambda+ell)) sum |g_mu - g_nu|^2, along the pairing.
    /// None when lambda is unavailable.
    pub interpolation_gap: Option<f64>,
}

impl SmoothnessReport {
    /// All gated gaps at least `-tol`.
    pub fn passes(&self, tol: f64) -> bool {
        let mut ok = self.gradient_sq_gap >= -tol
            && self.cocoercivity_gap >= -tol
            && self.coupling_gap_paired >= -tol;
        if let Some(p) = self.pairwise_min_gap {
            ok = ok && p >= -tol;
        }
        if let Some(g) = self.interpolation_gap {
            ok = ok && g >= -tol;
        }
        ok
    }
}

pub fn check_smoothness_consequences(
    obj: &dyn Objective,
    mu: &SparseMeasure,
    nu: &SparseMeasure,
    ell: Option<f64>,
    lambda: Option<f64>,
) -> Result<SmoothnessReport> {
    let meta = obj.regularity();
    let ell = resolve("smoothness", ell, meta.smoothness)?;
    if !(ell > 0.0) {
        return Err(Error::invalid(format!("smoothness constant must be positive, got {ell}")));
    }
    let lambda = lambda.or(meta.lambda);
    let plan = optimal_plan(mu, nu)?;
    let w2_sq = plan.squared_cost;
    let g_mu = obj.gradient(mu)?;
    let g_nu = obj.gradient(nu)?;
    let d = mu.dim();
    let n = mu.n();

    let mut diff_sq = 0.0;
    let mut diff_norm = 0.0;
    let mut inner_gw = 0.0; // <g_mu(i), v_sigma(i) - w_i>
    let mut inner_coupled = 0.0; // <g_nu(sigma i) - g_mu(i), v_sigma(i) - w_i>
    for (i, w) in mu.rows().enumerate() {
        let si = plan.permutation[i];
        let v = nu.particle(si);
        let gm = g_mu.row(i);
        let gn = g_nu.row(si);
        let mut sq = 0.0;
        for l in 0..d {
            let dg = gn[l] - gm[l];
            let dw = v[l] - w[l];
            sq += dg * dg;
            inner_gw += gm[l] * dw;
            inner_coupled += dg * dw;
        }
        diff_sq += sq;
        diff_norm += sq.sqrt();
    }

    let mut literal_sq = 0.0;
    let mut literal_inner = 0.0;
    for (i, w) in mu.rows().enumerate() {
        let v = nu.particle(i);
        let gm = g_mu.row(i);
        let gn = g_nu.row(i);
        for l in 0..d {
            let dg = gn[l] - gm[l];
            literal_sq += dg * dg;
            literal_inner += dg * (v[l] - w[l]);
        }
    }

    let pairwise_min_gap = if n < 2 {
        None
    } else {
        let mut min_gap = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let wi = mu.particle(i);
                let wj = mu.particle(j);
                let gi = g_mu.row(i);
                let gj = g_mu.row(j);
                let mut dw = 0.0;
                let mut dg = 0.0;
                for l in 0..d {
                    dw += (wi[l] - wj[l]) * (wi[l] - wj[l]);
                    dg += (gi[l] - gj[l]) * (gi[l] - gj[l]);
                }
                min_gap = min_gap.min(ell * dw.sqrt() - dg.sqrt());
            }
        }
        Some(min_gap)
    };

    let f_mu = obj.value(mu)?;
    let f_nu = obj.value(nu)?;

    // <g_mu - g_nu, w - v> equals inner_coupled: both factors flip sign.
    let interpolation_gap = lambda.map(|lam| {
        inner_coupled - (lam * ell / (lam + ell)) * w2_sq - diff_sq / (lam + ell)
    });

    Ok(SmoothnessReport {
        ell,
        lambda,
        w2_sq,
        gradient_sq_gap: ell * ell * w2_sq - diff_sq,
        gradient_stated_gap: ell * w2_sq - diff_norm,
        pairwise_min_gap,
        cocoercivity_gap: f_nu - f_mu - inner_gw - diff_sq / (2.0 * ell),
        coupling_gap_paired: inner_coupled - diff_sq / ell,
        coupling_gap_literal: literal_inner - literal_sq / ell,
        interpolation_gap,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContractionStep {
    pub k: usize,
    pub gamma: f64,
    pub dist_before: f64,
    pub dist_after: f64,
    /// Guaranteed per-step factor 1 - 2 lambda ell gamma / (lambda + ell).
    pub bound_factor: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContractionReport {
    pub steps: Vec<ContractionStep>,
    /// max over steps of dist_after - bound_factor * dist_before.
    pub max_excess: f64,
}

/// Run plain gradient descent from two starts in lockstep and compare the
/// transport distance shrinkage per step against the two-sided bound. Valid
/// for step sizes up to 2 / (lambda + ell).
pub fn check_contraction(
    obj: &dyn Objective,
    a0: &SparseMeasure,
    b0: &SparseMeasure,
    schedule: &StepSchedule,
    iters: usize,
    lambda: Option<f64>,
    ell: Option<f64>,
) -> Result<ContractionReport> {
    let meta = obj.regularity();
    let lambda = resolve("lambda", lambda, meta.lambda)?;
    let ell = resolve("smoothness", ell, meta.smoothness)?;
    if !(lambda > 0.0) || !(ell >= lambda) {
        return Err(Error::invalid(format!(
            "contraction needs 0 < lambda <= ell, got lambda = {lambda}, ell = {ell}"
        )));
    }
    schedule.validate()?;
    let gamma_max = 2.0 / (lambda + ell);
    let mut a = a0.clone();
    let mut b = b0.clone();
    let mut steps = Vec::with_capacity(iters);
    let mut max_excess = f64::NEG_INFINITY;
    for k in 1..=iters {
        let gamma = schedule.gamma(k, iters);
        if gamma > gamma_max * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "step {gamma} exceeds contraction regime 2/(lambda+ell) = {gamma_max}"
            )));
        }
        let dist_before = w2_squared(&a, &b)?.sqrt();
        descend(obj, &mut a, gamma)?;
        descend(obj, &mut b, gamma)?;
        let dist_after = w2_squared(&a, &b)?.sqrt();
        let bound_factor = 1.0 - 2.0 * lambda * ell * gamma / (lambda + ell);
        max_excess = max_excess.max(dist_after - bound_factor * dist_before);
        steps.push(ContractionStep { k, gamma, dist_before, dist_after, bound_factor });
    }
    if steps.is_empty() {
        max_excess = 0.0;
    }
    Ok(ContractionReport { steps, max_excess })
}

fn descend(obj: &dyn Objective, w: &mut SparseMeasure, gamma: f64) -> Result<()> {
    let g = obj.gradient(w)?;
    let d = w.dim();
    let data = w.as_mut_slice();
    for (i, row) in data.chunks_exact_mut(d).enumerate() {
        let gi = g.row(i);
        for l in 0..d {
            row[l] -= gamma * gi[l];
        }
    }
    if data.iter().any(|x| !x.is_finite()) {
        return Err(Error::NonFinite { context: "gradient step" });
    }
    Ok(())
}

/// Sign-flipped objective: turns minima into maxima, so convexity checks
/// must reject it.
#[derive(Debug, Clone)]
pub struct Negated<O>(pub O);

impl<O: Objective> Objective for Negated<O> {
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        Ok(-self.0.value(mu)?)
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        let mut g = self.0.gradient(mu)?;
        for x in g.as_mut_slice() {
            *x = -*x;
        }
        Ok(g)
    }

    fn regularity(&self) -> Regularity {
        Regularity::none()
    }
}

/// Pass-through objective reporting caller-chosen constants instead of the
/// inner ones; for testing that overclaimed curvature is caught.
#[derive(Debug, Clone)]
pub struct ClaimedRegularity<O> {
    pub inner: O,
    pub claim: Regularity,
}

impl<O: Objective> Objective for ClaimedRegularity<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        self.inner.value(mu)
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        self.inner.gradient(mu)
    }

    fn regularity(&self) -> Regularity {
        self.claim
    }
}

/// Adds a constant to every gradient coordinate while leaving values alone,
/// so finite-difference validation must flag it.
#[derive(Debug, Clone)]
pub struct GradientBias<O> {
    pub inner: O,
    pub bias: f64,
}

impl<O: Objective> Objective for GradientBias<O> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, mu: &SparseMeasure) -> Result<f64> {
        self.inner.value(mu)
    }

    fn gradient(&self, mu: &SparseMeasure) -> Result<Gradient> {
        let mut g = self.inner.gradient(mu)?;
        for x in g.as_mut_slice() {
            *x += self.bias;
        }
        Ok(g)
    }

    fn regularity(&self) -> Regularity {
        self.inner.regularity()
    }
}
