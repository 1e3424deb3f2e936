//! Determinism and bookkeeping of the optimizer loop.

mod common;

use displace::objectives::{EnergyDistanceUniform, Objective, QuadraticWell};
use displace::optim::{
    gd, pgd, run_batch, BatchInit, BatchOptions, NoiseKind, NoiseSpec, RunOptions, StepSchedule,
};
use displace::{Error, InitLaw, SparseMeasure};

fn quadratic() -> QuadraticWell {
    QuadraticWell::new(vec![0.0, 0.0]).unwrap()
}

fn init_grid() -> SparseMeasure {
    SparseMeasure::new(vec![
        vec![1.0, -1.0],
        vec![-0.5, 2.0],
        vec![2.0, 0.5],
        vec![-1.5, -1.5],
    ])
    .unwrap()
}

fn noisy_options(iters: usize) -> RunOptions {
    let mut opts = RunOptions::new(iters, StepSchedule::InverseSqrtK);
    opts.noise = NoiseSpec {
        kind: NoiseKind::UniformBall { radius: 0.1 },
        scale_by_sqrt_n: true,
    };
    opts.seed = 99;
    opts
}

#[test]
fn identical_options_reproduce_bitwise() {
    let obj = quadratic();
    let opts = noisy_options(200);
    let a = pgd(&obj, &init_grid(), &opts).unwrap();
    let b = pgd(&obj, &init_grid(), &opts).unwrap();
    assert_eq!(a.final_measure.as_slice(), b.final_measure.as_slice());
    assert_eq!(a.best_f.to_bits(), b.best_f.to_bits());
    for (ra, rb) in a.trajectory.records.iter().zip(&b.trajectory.records) {
        assert_eq!(ra.f_value.to_bits(), rb.f_value.to_bits());
        assert_eq!(ra.grad_norm_sq.to_bits(), rb.grad_norm_sq.to_bits());
    }
}

#[test]
fn gd_is_pgd_without_noise() {
    let obj = quadratic();
    let mut opts = RunOptions::new(150, StepSchedule::InverseSqrtK);
    opts.seed = 7;
    let plain = gd(&obj, &init_grid(), &opts).unwrap();
    let noiseless = pgd(&obj, &init_grid(), &opts).unwrap();
    assert_eq!(plain.final_measure.as_slice(), noiseless.final_measure.as_slice());
    assert_eq!(plain.final_f.to_bits(), noiseless.final_f.to_bits());
}

#[test]
fn logging_interval_does_not_change_dynamics() {
    let obj = quadratic();
    let mut coarse = noisy_options(137);
    coarse.log_every = 29;
    let mut fine = noisy_options(137);
    fine.log_every = 1;
    let a = pgd(&obj, &init_grid(), &coarse).unwrap();
    let b = pgd(&obj, &init_grid(), &fine).unwrap();
    assert_eq!(a.final_measure.as_slice(), b.final_measure.as_slice());
    assert_eq!(a.best_f.to_bits(), b.best_f.to_bits());
}

#[test]
fn trajectory_records_expected_iterations() {
    let obj = quadratic();
    let mut opts = RunOptions::new(10, StepSchedule::Constant { gamma: 0.1 });
    opts.log_every = 3;
    let out = gd(&obj, &init_grid(), &opts).unwrap();
    let ks: Vec<usize> = out.trajectory.records.iter().map(|r| r.k).collect();
    assert_eq!(ks, vec![0, 3, 6, 9, 10]);

    // Final iteration never duplicates when it is itself a logging point.
    let mut opts = RunOptions::new(9, StepSchedule::Constant { gamma: 0.1 });
    opts.log_every = 3;
    let out = gd(&obj, &init_grid(), &opts).unwrap();
    let ks: Vec<usize> = out.trajectory.records.iter().map(|r| r.k).collect();
    assert_eq!(ks, vec![0, 3, 6, 9]);
}

#[test]
fn oversized_step_reports_divergence() {
    let obj = quadratic();
    let opts = RunOptions::new(10_000, StepSchedule::Constant { gamma: 1.5 });
    match gd(&obj, &init_grid(), &opts) {
        Err(Error::Diverged { .. }) => {}
        other => panic!("expected divergence, got {other:?}"),
    }
}

#[test]
fn best_value_is_minimum_over_trajectory() {
    let obj = EnergyDistanceUniform::new(-1.0, 1.0).unwrap();
    let init = SparseMeasure::new(vec![vec![-2.0], vec![0.1], vec![1.7], vec![0.4]]).unwrap();
    let mut opts = noisy_options(500);
    opts.log_every = 1;
    let out = pgd(&obj, &init, &opts).unwrap();
    let min_logged = out
        .trajectory
        .records
        .iter()
        .map(|r| r.f_value)
        .fold(f64::INFINITY, f64::min);
    assert!(out.best_f <= min_logged + 1e-15);
    assert_eq!(obj.value(&out.best_measure).unwrap().to_bits(), out.best_f.to_bits());
}

#[test]
fn batch_mean_curve_is_exact_mean_of_runs() {
    let obj = quadratic();
    let mut run = noisy_options(80);
    run.log_every = 20;
    let opts = BatchOptions {
        runs: 4,
        base_seed: 1234,
        init: BatchInit::Random {
            n: 5,
            d: 2,
            law: InitLaw::UniformBox { lo: -2.0, hi: 2.0 },
        },
        run,
    };
    let batch = run_batch(&obj, &opts).unwrap();
    assert_eq!(batch.per_run.len(), 4);

    for (i, point) in batch.mean_curve.iter().enumerate() {
        let mut acc = 0.0;
        for r in &batch.per_run {
            let rec = &r.trajectory.records[i];
            assert_eq!(rec.k, point.k);
            acc += rec.f_value;
        }
        assert_eq!((acc / 4.0).to_bits(), point.mean_f.to_bits());
    }

    // Distinct seeds must explore distinct starting points.
    let a = batch.per_run[0].trajectory.records[0].f_value;
    let b = batch.per_run[1].trajectory.records[0].f_value;
    assert_ne!(a.to_bits(), b.to_bits());
}

#[test]
fn fixed_init_batch_differs_only_through_noise() {
    let obj = quadratic();
    let run = noisy_options(50);
    let opts = BatchOptions {
        runs: 3,
        base_seed: 55,
        init: BatchInit::Fixed(init_grid()),
        run,
    };
    let batch = run_batch(&obj, &opts).unwrap();
    let f0: Vec<u64> = batch
        .per_run
        .iter()
        .map(|r| r.trajectory.records[0].f_value.to_bits())
        .collect();
    assert_eq!(f0[0], f0[1]);
    assert_eq!(f0[1], f0[2]);
    let last: Vec<u64> = batch
        .per_run
        .iter()
        .map(|r| r.final_f.to_bits())
        .collect();
    assert_ne!(last[0], last[1]);
}

#[test]
fn trajectory_csv_round_trips_full_precision() {
    let obj = quadratic();
    let mut opts = RunOptions::new(25, StepSchedule::InverseSqrtK);
    opts.log_every = 5;
    opts.target = Some(SparseMeasure::new(vec![vec![0.0, 0.0]; 4]).unwrap());
    let out = gd(&obj, &init_grid(), &opts).unwrap();

    let mut buf = Vec::new();
    out.trajectory.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "k,f_value,w2sq_to_target,grad_norm_sq,min_gap");

    let mut rows = 0;
    for (line, rec) in lines.zip(&out.trajectory.records) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0].parse::<usize>().unwrap(), rec.k);
        let f: f64 = fields[1].parse().unwrap();
        assert_eq!(f.to_bits(), rec.f_value.to_bits());
        let w2: f64 = fields[2].parse().unwrap();
        assert_eq!(w2.to_bits(), rec.w2sq_to_target.unwrap().to_bits());
        rows += 1;
    }
    assert_eq!(rows, out.trajectory.records.len());
}

#[test]
fn sphere_projection_keeps_unit_norms() {
    let obj = QuadraticWell::new(vec![2.0, 0.0, 0.0]).unwrap();
    let init = SparseMeasure::random_init(6, 3, &InitLaw::UniformSphere, 3).unwrap();
    let mut opts = RunOptions::new(100, StepSchedule::Constant { gamma: 0.05 });
    opts.project_sphere = true;
    let out = gd(&obj, &init, &opts).unwrap();
    for row in out.final_measure.rows() {
        let norm: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
        assert!((norm - 1.0).abs() <= 1e-12);
    }
}
