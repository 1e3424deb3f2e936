//! Averaged stochastic descent onto a random discrete target, with the
//! suboptimality curve referenced against the same runs at ten times the
//! horizon.

use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use displace::objectives::EnergyDistance;
use displace::optim::{
    run_batch, BatchInit, BatchOptions, NoiseKind, NoiseSpec, RunOptions, StepSchedule,
};
use displace::{InitLaw, SparseMeasure};

use crate::config::{config_hash, Fig1Config};
use crate::report::{csv_with_hash, loglog_slope, write_json};

#[derive(Debug, Clone, Serialize)]
pub struct Fig1Summary {
    pub config_hash: String,
    pub reference_value: f64,
    pub final_mean_suboptimality: f64,
    /// Log-log slope of mean suboptimality over the final decade of
    /// iterations.
    pub slope: Option<f64>,
    pub fit_points: usize,
}

pub fn run(cfg: &Fig1Config, out: &Path) -> Result<Fig1Summary> {
    let hash = config_hash(cfg);
    let law = InitLaw::UniformBox { lo: 0.0, hi: 1.0 };
    let target = SparseMeasure::random_init(cfg.particles, 1, &law, cfg.seed)?;
    let obj = EnergyDistance::new(&target)?;

    let mut run_opts = RunOptions::new(cfg.iters, StepSchedule::InverseSqrtK);
    run_opts.noise = NoiseSpec {
        kind: NoiseKind::UniformBox { radius: cfg.noise_radius },
        scale_by_sqrt_n: false,
    };
    run_opts.log_every = cfg.log_every;
    let batch_opts = BatchOptions {
        runs: cfg.runs,
        base_seed: cfg.seed.wrapping_add(1),
        init: BatchInit::Random { n: cfg.particles, d: 1, law },
        run: run_opts,
    };
    let batch = run_batch(&obj, &batch_opts)?;

    // Same seeds, ten times the horizon: every trajectory above is a prefix
    // of its reference twin, so the best reference value lower-bounds all
    // logged values and suboptimalities stay nonnegative.
    let mut ref_opts = batch_opts.clone();
    ref_opts.run.iters = cfg.reference_iters;
    ref_opts.run.log_every = cfg.reference_iters;
    let reference = run_batch(&obj, &ref_opts)?;
    let f_hat = reference
        .per_run
        .iter()
        .map(|r| r.best_f)
        .fold(f64::INFINITY, f64::min);

    let curve: Vec<(usize, f64)> = batch
        .mean_curve
        .iter()
        .map(|p| (p.k, p.mean_f - f_hat))
        .collect();

    let mut writer = csv_with_hash(&out.join("fig1.csv"), &hash)?;
    writer.write_record(["k", "mean_suboptimality"])?;
    for &(k, subopt) in &curve {
        writer.write_record(&[k.to_string(), subopt.to_string()])?;
    }
    writer.flush()?;

    let fit_floor = cfg.iters / 10;
    let fit: Vec<(f64, f64)> = curve
        .iter()
        .filter(|&&(k, _)| k >= fit_floor && k >= 1)
        .map(|&(k, s)| (k as f64, s))
        .collect();
    let fit_points = fit.len();
    let slope = loglog_slope(fit);

    let summary = Fig1Summary {
        config_hash: hash,
        reference_value: f_hat,
        final_mean_suboptimality: curve.last().map(|&(_, s)| s).unwrap_or(f64::NAN),
        slope,
        fit_points,
    };
    write_json(&out.join("fig1_summary.json"), &summary)?;
    Ok(summary)
}
