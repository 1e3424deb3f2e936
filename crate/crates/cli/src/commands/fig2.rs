//! Best achievable distance to a uniform interval as a function of the
//! particle budget, solved by greedy atom insertion and polished descent.

use std::path::Path;

use anyhow::Result;
use serde::Serialize;

use displace::frankwolfe::{approximation_error_sweep, GridDomain, SweepPgd};
use displace::objectives::EnergyDistanceUniform;
use displace::optim::{NoiseKind, NoiseSpec, RunOptions, StepSchedule};

use crate::config::{config_hash, Fig2Config};
use crate::report::{csv_with_hash, loglog_slope, write_json};

#[derive(Debug, Clone, Serialize)]
pub struct Fig2Summary {
    pub config_hash: String,
    /// Log-log slope of error against particle count.
    pub slope: Option<f64>,
    pub first_error: f64,
    pub last_error: f64,
}

pub fn run(cfg: &Fig2Config, out: &Path) -> Result<Fig2Summary> {
    let hash = config_hash(cfg);
    let obj = EnergyDistanceUniform::new(cfg.lo, cfg.hi)?;
    let grid = GridDomain { lo: cfg.lo, hi: cfg.hi, points: cfg.grid_points };

    let mut run_opts = RunOptions::new(cfg.iters, StepSchedule::InverseSqrtTotal);
    run_opts.noise = NoiseSpec {
        kind: NoiseKind::UniformBall { radius: cfg.noise_radius },
        scale_by_sqrt_n: true,
    };
    run_opts.log_every = cfg.iters;
    let pgd = SweepPgd { runs: cfg.pgd_runs, base_seed: cfg.seed, run: run_opts };

    let rows = approximation_error_sweep(&obj, &grid, &cfg.ns, &pgd)?;

    let mut writer = csv_with_hash(&out.join("fig2.csv"), &hash)?;
    writer.write_record(["n", "error"])?;
    for row in &rows {
        writer.write_record(&[row.n.to_string(), row.error.to_string()])?;
    }
    writer.flush()?;

    let mut detail = csv_with_hash(&out.join("fig2_detail.csv"), &hash)?;
    detail.write_record(["n", "error", "error_fw", "error_pgd"])?;
    for row in &rows {
        detail.write_record(&[
            row.n.to_string(),
            row.error.to_string(),
            row.error_fw.to_string(),
            row.error_pgd.to_string(),
        ])?;
    }
    detail.flush()?;

    let slope = loglog_slope(rows.iter().map(|r| (r.n as f64, r.error)));
    let summary = Fig2Summary {
        config_hash: hash,
        slope,
        first_error: rows.first().map(|r| r.error).unwrap_or(f64::NAN),
        last_error: rows.last().map(|r| r.error).unwrap_or(f64::NAN),
    };
    write_json(&out.join("fig2_summary.json"), &summary)?;
    Ok(summary)
}
