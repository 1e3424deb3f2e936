//! Parallel vs sequential execution on pairwise-interaction workloads.
//!
//! Both paths produce bitwise-identical results; these benches measure what
//! the rayon path buys (or costs) at various particle counts. Run with
//! `cargo bench -p displace`.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use displace::exec;
use displace::objectives::{Kernel, MmdObjective, Objective};
use displace::SparseMeasure;

fn random_measure(n: usize, d: usize, seed: u64) -> SparseMeasure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rows = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    SparseMeasure::new(rows).unwrap()
}

/// One "row" of a pairwise objective: a kernel sum over all other particles.
fn row_sum(data: &[f64], d: usize, n: usize, i: usize) -> f64 {
    let xi = &data[i * d..(i + 1) * d];
    let mut acc = 0.0;
    for j in 0..n {
        let xj = &data[j * d..(j + 1) * d];
        let dsq: f64 = xi.iter().zip(xj).map(|(a, b)| (a - b) * (a - b)).sum();
        acc += (-dsq).exp();
    }
    acc
}

fn bench_pairwise_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("pairwise_sum");
    for &n in &[64usize, 256, 1024, 4096] {
        let d = 2;
        let mu = random_measure(n, d, 7);
        let data: Vec<f64> = mu.as_slice().to_vec();
        group.bench_with_input(BenchmarkId::new("sequential", n), &n, |b, &n| {
            b.iter(|| exec::sum_indexed_seq(n, |i| row_sum(&data, d, n, i)))
        });
        group.bench_with_input(BenchmarkId::new("parallel", n), &n, |b, &n| {
            b.iter(|| exec::sum_indexed(n, |i| row_sum(&data, d, n, i)))
        });
    }
    group.finish();
}

fn bench_mmd_gradient(c: &mut Criterion) {
    let mut group = c.benchmark_group("mmd_gradient");
    for &n in &[64usize, 512, 2048] {
        let target = random_measure(n, 2, 11);
        let obj = MmdObjective::new(Kernel::Gaussian { bandwidth: 0.5 }, &target).unwrap();
        let mu = random_measure(n, 2, 13);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| obj.gradient(&mu).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_pairwise_sum, bench_mmd_gradient);
criterion_main!(benches);
