//! (Perturbed) gradient descent on particle positions.
//!
//! One step moves every particle along the objective gradient plus optional
//! noise: w_i <- w_i - gamma_k (g_i + s xi_i), where s is 1 or 1/sqrt(n).
//! Runs are reproducible: noise comes from a counter-based generator on its
//! own stream, so a run is a pure function of (objective, init, options).
//! Batch runs may execute in parallel; per-run results and the mean curve
//! are identical to sequential execution bitwise.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec;
use crate::measure::{InitLaw, SparseMeasure};
use crate::objectives::{Gradient, Objective};
use crate::transport::w2_squared;

/// Step size as a function of the 1-based step index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepSchedule {
    Constant { gamma: f64 },
    /// 2 / (lambda (k + 1)); the classical rate for objectives with
    /// quadratic growth lambda.
    InverseLinear { lambda: f64 },
    /// 1 / sqrt(total), constant over the run.
    InverseSqrtTotal,
    /// 1 / sqrt(k).
    InverseSqrtK,
}

impl StepSchedule {
    pub fn validate(&self) -> Result<()> {
        match *self {
            StepSchedule::Constant { gamma } => {
                if !(gamma > 0.0) || !gamma.is_finite() {
                    return Err(Error::invalid(format!("step size must be positive, got {gamma}")));
                }
            }
            StepSchedule::InverseLinear { lambda } => {
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return Err(Error::invalid(format!(
                        "inverse_linear schedule needs lambda > 0, got {lambda}"
                    )));
                }
            }
            StepSchedule::InverseSqrtTotal | StepSchedule::InverseSqrtK => {}
        }
        Ok(())
    }

    pub fn gamma(&self, k: usize, total: usize) -> f64 {
        debug_assert!(k >= 1);
        match *self {
            StepSchedule::Constant { gamma } => gamma,
            StepSchedule::InverseLinear { lambda } => 2.0 / (lambda * (k as f64 + 1.0)),
            StepSchedule::InverseSqrtTotal => 1.0 / (total.max(1) as f64).sqrt(),
            StepSchedule::InverseSqrtK => 1.0 / (k as f64).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    None,
    /// Uniform in the ball of this radius.
    UniformBall { radius: f64 },
    /// Each coordinate uniform in [-radius, radius].
    UniformBox { radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub kind: NoiseKind,
    /// Multiply draws by 1/sqrt(n).
    #[serde(default)]
    pub scale_by_sqrt_n: bool,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec { kind: NoiseKind::None, scale_by_sqrt_n: false }
    }
}

impl NoiseSpec {
    pub fn none() -> Self {
        NoiseSpec::default()
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            NoiseKind::None => Ok(()),
            NoiseKind::UniformBall { radius } | NoiseKind::UniformBox { radius } => {
                if !(radius > 0.0) || !radius.is_finite() {
                    Err(Error::invalid(format!("noise radius must be positive, got {radius}")))
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub iters: usize,
    pub schedule: StepSchedule,
    pub noise: NoiseSpec,
    /// Record the trajectory at step 0, every `log_every` steps, and at the
    /// final step.
    pub log_every: usize,
    /// Renormalize every particle to the unit sphere after each step.
    pub project_sphere: bool,
    /// Seed for the noise stream.
    pub seed: u64,
    /// When present, recorded trajectory points include the squared
    /// transport distance to this measure.
    pub target: Option<SparseMeasure>,
}

impl RunOptions {
    pub fn new(iters: usize, schedule: StepSchedule) -> Self {
        RunOptions {
            iters,
            schedule,
            noise: NoiseSpec::none(),
            log_every: 1,
            project_sphere: false,
            seed: 0,
            target: None,
        }
    }

    fn validate(&self) -> Result<()> {
        self.schedule.validate()?;
        self.noise.validate()?;
        if self.log_every == 0 {
            return Err(Error::invalid("log_every must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub k: usize,
    pub f_value: f64,
    pub w2sq_to_target: Option<f64>,
    pub grad_norm_sq: f64,
    pub min_gap: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        for rec in &self.records {
            wtr.serialize(rec)?;
        }
        wtr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub final_measure: SparseMeasure,
    pub final_f: f64,
    pub best_f: f64,
    pub best_measure: SparseMeasure,
    pub trajectory: Trajectory,
}

/// Far-field guards: the run is declared divergent when the value climbs six
/// orders above its start or any coordinate leaves [-1e12, 1e12].
const VALUE_BLOWUP: f64 = 1e6;
const COORD_LIMIT: f64 = 1e12;

pub fn pgd(obj: &dyn Objective, init: &SparseMeasure, opts: &RunOptions) -> Result<RunResult> {
    opts.validate()?;
    let n = init.n();
    let d = init.dim();
    let mut w = init.clone();
    if opts.project_sphere {
        project_rows(&mut w)?;
    }
    let mut f = obj.value(&w)?;
    if !f.is_finite() {
        return Err(Error::Diverged { k: 0, what: "objective value" });
    }
    let guard = VALUE_BLOWUP * (1.0 + f.abs());
    let mut best_f = f;
    let mut best_measure = w.clone();
    let mut records = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    rng.set_stream(1);
    let noise_scale =
        if opts.noise.scale_by_sqrt_n { 1.0 / (n as f64).sqrt() } else { 1.0 };

    let mut xi = vec![0.0f64; d];
    for k in 1..=opts.iters {
        let g = obj.gradient(&w)?;
        if (k - 1) % opts.log_every == 0 {
            records.push(make_record(k - 1, &w, f, &g, opts)?);
        }
        let gamma = opts.schedule.gamma(k, opts.iters);
        {
            let data = w.as_mut_slice();
            for i in 0..n {
                let has_noise = draw_noise(&opts.noise.kind, &mut rng, &mut xi)?;
                let gi = g.row(i);
                let row = &mut data[i * d..(i + 1) * d];
                if has_noise {
                    for l in 0..d {
                        row[l] -= gamma * (gi[l] + noise_scale * xi[l]);
                    }
                } else {
                    for l in 0..d {
                        row[l] -= gamma * gi[l];
                    }
                }
            }
        }
        if opts.project_sphere {
            project_rows(&mut w)?;
        }
        if w.as_slice().iter().any(|x| !x.is_finite() || x.abs() > COORD_LIMIT) {
            return Err(Error::Diverged { k, what: "particle coordinate" });
        }
        f = obj.value(&w)?;
        if !f.is_finite() || f > guard {
            return Err(Error::Diverged { k, what: "objective value" });
        }
        if f < best_f {
            best_f = f;
            best_measure = w.clone();
        }
    }
    let g_final = obj.gradient(&w)?;
    records.push(make_record(opts.iters, &w, f, &g_final, opts)?);

    Ok(RunResult {
        final_measure: w,
        final_f: f,
        best_f,
        best_measure,
        trajectory: Trajectory { records },
    })
}

/// Plain gradient descent: `pgd` with the noise forced off.
pub fn gd(obj: &dyn Objective, init: &SparseMeasure, opts: &RunOptions) -> Result<RunResult> {
    let mut opts = opts.clone();
    opts.noise = NoiseSpec::none();
    pgd(obj, init, &opts)
}

fn make_record(
    k: usize,
    w: &SparseMeasure,
    f: f64,
    g: &Gradient,
    opts: &RunOptions,
) -> Result<TrajectoryRecord> {
    let w2sq_to_target = match &opts.target {
        Some(t) => Some(w2_squared(w, t)?),
        None => None,
    };
    Ok(TrajectoryRecord {
        k,
        f_value: f,
        w2sq_to_target,
        grad_norm_sq: g.norm_sq(),
        min_gap: w.min_pairwise_distance(),
    })
}

/// True if noise was drawn into `xi`.
fn draw_noise(kind: &NoiseKind, rng: &mut ChaCha8Rng, xi: &mut [f64]) -> Result<bool> {
    match *kind {
        NoiseKind::None => Ok(false),
        NoiseKind::UniformBox { radius } => {
            for x in xi.iter_mut() {
                *x = rng.gen_range(-radius..radius);
            }
            Ok(true)
        }
        NoiseKind::UniformBall { radius } => {
            let d = xi.len();
            for _ in 0..64 {
                let mut norm_sq = 0.0;
                for x in xi.iter_mut() {
                    let z: f64 = rng.sample(rand_distr::StandardNormal);
                    *x = z;
                    norm_sq += z * z;
                }
                if norm_sq > 1e-24 {
                    let u: f64 = rng.gen_range(0.0..1.0);
                    let len = radius * u.powf(1.0 / d as f64) / norm_sq.sqrt();
                    for x in xi.iter_mut() {
                        *x *= len;
                    }
                    return Ok(true);
                }
            }
            Err(Error::NonFinite { context: "ball noise direction" })
        }
    }
}

fn project_rows(w: &mut SparseMeasure) -> Result<()> {
    let d = w.dim();
    let data = w.as_mut_slice();
    for (i, row) in data.chunks_exact_mut(d).enumerate() {
        let norm_sq: f64 = row.iter().map(|x| x * x).sum();
        if norm_sq <= 1e-24 || !norm_sq.is_finite() {
            return Err(Error::ZeroNormParticle { index: i });
        }
        let r = norm_sq.sqrt();
        for x in row.iter_mut() {
            *x /= r;
        }
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub enum BatchInit {
    /// Same start every run; only the noise stream differs.
    Fixed(SparseMeasure),
    /// Fresh draw per run from the law, seeded by the run's seed.
    Random { n: usize, d: usize, law: InitLaw },
}

#[derive(Debug, Clone)]
pub struct BatchOptions {
    pub runs: usize,
    /// Run r uses seed base_seed + r for both its init draw and its noise.
    pub base_seed: u64,
    pub init: BatchInit,
    pub run: RunOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCurvePoint {
    pub k: usize,
    pub mean_f: f64,
}

#[derive(Debug)]
pub struct BatchResult {
    pub per_run: Vec<RunResult>,
    pub mean_curve: Vec<MeanCurvePoint>,
}

pub fn run_batch(obj: &dyn Objective, opts: &BatchOptions) -> Result<BatchResult> {
    if opts.runs == 0 {
        return Err(Error::invalid("batch needs at least one run"));
    }
    let results: Vec<Result<RunResult>> = exec::map_indexed_coarse(opts.runs, |r| {
        let seed = opts.base_seed + r as u64;
        let init = match &opts.init {
            BatchInit::Fixed(m) => m.clone(),
            BatchInit::Random { n, d, law } => SparseMeasure::random_init(*n, *d, law, seed)?,
        };
        let mut run_opts = opts.run.clone();
        run_opts.seed = seed;
        pgd(obj, &init, &run_opts)
    });
    let mut per_run = Vec::with_capacity(opts.runs);
    for r in results {
        per_run.push(r?);
    }
    let ks: Vec<usize> = per_run[0].trajectory.records.iter().map(|r| r.k).collect();
    for run in &per_run[1..] {
        let these: Vec<usize> = run.trajectory.records.iter().map(|r| r.k).collect();
        if these != ks {
            return Err(Error::invalid("batch runs produced misaligned trajectories"));
        }
    }
    // Fold run results in seed order.
    let mean_curve = ks
        .iter()
        .enumerate()
        .map(|(idx, &k)| {
            let mut acc = 0.0;
            for run in &per_run {
                acc += run.trajectory.records[idx].f_value;
            }
            MeanCurvePoint { k, mean_f: acc / opts.runs as f64 }
        })
        .collect();
    Ok(BatchResult { per_run, mean_curve })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::QuadraticWell;

    fn well() -> QuadraticWell {
        QuadraticWell::new(vec![1.0, -2.0]).unwrap()
    }

    fn start() -> SparseMeasure {
        SparseMeasure::new(vec![vec![3.0, 0.0], vec![-1.0, 4.0]]).unwrap()
    }

    #[test]
    fn schedule_values() {
        assert_eq!(StepSchedule::Constant { gamma: 0.3 }.gamma(5, 100), 0.3);
        assert_eq!(StepSchedule::InverseLinear { lambda: 2.0 }.gamma(1, 100), 0.5);
        assert_eq!(StepSchedule::InverseLinear { lambda: 2.0 }.gamma(3, 100), 0.25);
        assert_eq!(StepSchedule::InverseSqrtTotal.gamma(7, 100), 0.1);
        assert_eq!(StepSchedule::InverseSqrtK.gamma(4, 100), 0.5);
        assert!(StepSchedule::Constant { gamma: 0.0 }.validate().is_err());
        assert!(StepSchedule::InverseLinear { lambda: -1.0 }.validate().is_err());
    }

    #[test]
    fn half_step_lands_on_quadratic_center_in_one_iteration() {
        let obj = well();
        let opts = RunOptions::new(1, StepSchedule::Constant { gamma: 0.5 });
        let out = gd(&obj, &start(), &opts).unwrap();
        assert_eq!(out.final_measure.as_slice(), &[1.0, -2.0, 1.0, -2.0]);
        assert_eq!(out.final_f, 0.0);
    }

    #[test]
    fn quarter_step_halves_the_offset_each_iteration() {
        let obj = well();
        let opts = RunOptions::new(3, StepSchedule::Constant { gamma: 0.25 });
        let out = gd(&obj, &start(), &opts).unwrap();
        // Offsets shrink by 1/2 per step; after 3 steps by 1/8.
        let got = out.final_measure.particle(0);
        assert!((got[0] - (1.0 + 2.0 / 8.0)).abs() < 1e-12);
        assert!((got[1] - (-2.0 + 2.0 / 8.0)).abs() < 1e-12);
    }

    #[test]
    fn record_schedule_hits_zero_multiples_and_final() {
        let obj = well();
        let mut opts = RunOptions::new(10, StepSchedule::Constant { gamma: 0.1 });
        opts.log_every = 3;
        let out = gd(&obj, &start(), &opts).unwrap();
        let ks: Vec<usize> = out.trajectory.records.iter().map(|r| r.k).collect();
        assert_eq!(ks, vec![0, 3, 6, 9, 10]);
        let f: Vec<f64> = out.trajectory.records.iter().map(|r| r.f_value).collect();
        assert!(f.windows(2).all(|p| p[1] <= p[0]));
    }

    #[test]
    fn zero_iterations_only_evaluates_the_start() {
        let obj = well();
        let opts = RunOptions::new(0, StepSchedule::Constant { gamma: 0.1 });
        let out = gd(&obj, &start(), &opts).unwrap();
        assert_eq!(out.trajectory.records.len(), 1);
        assert_eq!(out.trajectory.records[0].k, 0);
        assert_eq!(out.final_f, out.best_f);
    }

    #[test]
    fn oversized_steps_are_reported_as_divergence() {
        let obj = well();
        let opts = RunOptions::new(60, StepSchedule::Constant { gamma: 2.0 });
        match gd(&obj, &start(), &opts) {
            Err(Error::Diverged { .. }) => {}
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn same_seed_reproduces_bitwise_and_gd_matches_noiseless_pgd() {
        let obj = well();
        let mut opts = RunOptions::new(200, StepSchedule::InverseSqrtK);
        opts.noise =
            NoiseSpec { kind: NoiseKind::UniformBox { radius: 0.05 }, scale_by_sqrt_n: false };
        opts.seed = 42;
        let a = pgd(&obj, &start(), &opts).unwrap();
        let b = pgd(&obj, &start(), &opts).unwrap();
        assert_eq!(a.final_measure.as_slice(), b.final_measure.as_slice());
        assert_eq!(a.best_f, b.best_f);

        let mut quiet = opts.clone();
        quiet.noise = NoiseSpec::none();
        let c = pgd(&obj, &start(), &quiet).unwrap();
        let d = gd(&obj, &start(), &opts).unwrap();
        assert_eq!(c.final_measure.as_slice(), d.final_measure.as_slice());
    }

    #[test]
    fn ball_noise_keeps_the_run_near_the_center() {
        let obj = well();
        let mut opts = RunOptions::new(500, StepSchedule::InverseSqrtK);
        opts.noise =
            NoiseSpec { kind: NoiseKind::UniformBall { radius: 0.1 }, scale_by_sqrt_n: true };
        opts.seed = 7;
        let out = pgd(&obj, &start(), &opts).unwrap();
        assert!(out.final_f < 0.05, "final_f = {}", out.final_f);
        assert!(out.best_f <= out.final_f);
    }

    #[test]
    fn sphere_projection_keeps_unit_norms() {
        let obj = well();
        let mut opts = RunOptions::new(50, StepSchedule::Constant { gamma: 0.05 });
        opts.project_sphere = true;
        let init = SparseMeasure::new(vec![vec![0.6, 0.8], vec![-1.0, 0.0]]).unwrap();
        let out = gd(&obj, &init, &opts).unwrap();
        for row in out.final_measure.rows() {
            let norm: f64 = row.iter().map(|x| x * x).sum::<f64>();
            assert!((norm - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn target_logging_records_transport_distance() {
        let obj = well();
        let mut opts = RunOptions::new(4, StepSchedule::Constant { gamma: 0.25 });
        opts.target =
            Some(SparseMeasure::new(vec![vec![1.0, -2.0], vec![1.0, -2.0]]).unwrap());
        let out = gd(&obj, &start(), &opts).unwrap();
        let w2: Vec<f64> =
            out.trajectory.records.iter().map(|r| r.w2sq_to_target.unwrap()).collect();
        assert!(w2.windows(2).all(|p| p[1] <= p[0]));
        assert!(w2[0] > 0.0);
    }

    #[test]
    fn batch_runs_share_record_grid_and_differ_by_seed() {
        let obj = well();
        let mut run = RunOptions::new(30, StepSchedule::InverseSqrtK);
        run.log_every = 10;
        run.noise =
            NoiseSpec { kind: NoiseKind::UniformBox { radius: 0.2 }, scale_by_sqrt_n: false };
        let opts = BatchOptions {
            runs: 3,
            base_seed: 11,
            init: BatchInit::Random {
                n: 2,
                d: 2,
                law: InitLaw::UniformBox { lo: -1.0, hi: 1.0 },
            },
            run,
        };
        let out = run_batch(&obj, &opts).unwrap();
        assert_eq!(out.per_run.len(), 3);
        assert_eq!(out.mean_curve.len(), out.per_run[0].trajectory.records.len());
        assert_ne!(
            out.per_run[0].final_measure.as_slice(),
            out.per_run[1].final_measure.as_slice()
        );
        let manual: f64 = out.per_run.iter().map(|r| r.final_f).sum::<f64>() / 3.0;
        assert_eq!(out.mean_curve.last().unwrap().mean_f, manual);
    }

    #[test]
    fn trajectory_csv_has_header_and_rows() {
        let obj = well();
        let opts = RunOptions::new(2, StepSchedule::Constant { gamma: 0.25 });
        let out = gd(&obj, &start(), &opts).unwrap();
        let mut buf = Vec::new();
        out.trajectory.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "k,f_value,w2sq_to_target,grad_norm_sq,min_gap");
        assert_eq!(text.lines().count(), 1 + out.trajectory.records.len());
    }
}
