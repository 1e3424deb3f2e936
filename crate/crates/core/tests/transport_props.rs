mod common;

use common::{measure_pair, sq_dist};
use displace::transport::{displacement_interpolate, optimal_plan, w2_squared};
use displace::{Error, SparseMeasure};
use itertools::Itertools;
use proptest::prelude::*;

fn naive_cost(mu: &SparseMeasure, nu: &SparseMeasure, perm: &[usize]) -> f64 {
    (0..mu.n()).map(|i| sq_dist(mu.particle(i), nu.particle(perm[i]))).sum()
}

proptest! {
    #[test]
    fn plan_matches_exhaustive_minimum(
        (mu, nu) in measure_pair(1..=5, 1..=3, -10.0, 10.0),
    ) {
        let plan = optimal_plan(&mu, &nu).unwrap();

        let mut seen = vec![false; mu.n()];
        for &p in &plan.permutation {
            prop_assert!(p < mu.n() && !seen[p]);
            seen[p] = true;
        }

        let brute = (0..mu.n())
            .permutations(mu.n())
            .map(|p| naive_cost(&mu, &nu, &p))
            .fold(f64::INFINITY, f64::min);
        let scale = 1.0 + brute.abs();
        prop_assert!((plan.squared_cost - brute).abs() <= 1e-9 * scale);
        prop_assert!(naive_cost(&mu, &nu, &plan.permutation) <= brute + 1e-9 * scale);
    }

    #[test]
    fn one_dimensional_plan_is_exhaustive_minimum(
        (mu, nu) in measure_pair(1..=7, 1..=1, -10.0, 10.0),
    ) {
        let plan = optimal_plan(&mu, &nu).unwrap();
        let brute = (0..mu.n())
            .permutations(mu.n())
            .map(|p| naive_cost(&mu, &nu, &p))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((plan.squared_cost - brute).abs() <= 1e-9 * (1.0 + brute.abs()));
    }

    #[test]
    fn metric_axioms(
        (a, b) in measure_pair(1..=6, 1..=3, -5.0, 5.0),
        c_rows in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 3), 6),
    ) {
        prop_assert_eq!(w2_squared(&a, &a).unwrap(), 0.0);

        let ab = w2_squared(&a, &b).unwrap();
        let ba = w2_squared(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab));

        // Triangle inequality, on a third measure of matching shape.
        let c = SparseMeasure::new(
            c_rows.into_iter().take(a.n()).map(|r| r[..a.dim()].to_vec()).collect(),
        );
        if let Ok(c) = c {
            if c.n() == a.n() {
                let ac = w2_squared(&a, &c).unwrap().sqrt();
                let bc = w2_squared(&b, &c).unwrap().sqrt();
                prop_assert!(ac <= ab.sqrt() + bc + 1e-9);
            }
        }
    }

    #[test]
    fn interpolation_endpoints_and_scaling(
        (mu, nu) in measure_pair(2..=6, 1..=3, -5.0, 5.0),
    ) {
        let at0 = displacement_interpolate(&mu, &nu, 0.0).unwrap();
        for (x, y) in at0.as_slice().iter().zip(mu.as_slice()) {
            prop_assert_eq!(x, y);
        }

        // t = 1 lands on nu up to relabeling.
        let at1 = displacement_interpolate(&mu, &nu, 1.0).unwrap();
        prop_assert!(w2_squared(&at1, &nu).unwrap() <= 1e-18);

        let w2 = w2_squared(&mu, &nu).unwrap();
        let (s, t) = (0.2, 0.7);
        let ms = displacement_interpolate(&mu, &nu, s).unwrap();
        let mt = displacement_interpolate(&mu, &nu, t).unwrap();
        let got = w2_squared(&ms, &mt).unwrap();
        let want = (t - s) * (t - s) * w2;
        prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want));
    }

    #[test]
    fn interpolation_rejects_out_of_range(
        (mu, nu) in measure_pair(1..=4, 1..=2, -1.0, 1.0),
        t in prop_oneof![(-100.0..-0.01f64), (1.01..100.0f64)],
    ) {
        prop_assert!(matches!(
            displacement_interpolate(&mu, &nu, t),
            Err(Error::InterpolationOutOfRange(_))
        ));
    }
}

proptest! {
    // The assignment solver sees its hardest inputs when many particles
    // coincide; degenerate ties must still produce the true optimum.
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn plan_handles_clustered_ties(
        picks_mu in prop::collection::vec(0..3usize, 5),
        picks_nu in prop::collection::vec(0..3usize, 5),
    ) {
        let sites = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];
        let mu = SparseMeasure::new(picks_mu.iter().map(|&i| sites[i].to_vec()).collect()).unwrap();
        let nu = SparseMeasure::new(picks_nu.iter().map(|&i| sites[i].to_vec()).collect()).unwrap();
        let plan = optimal_plan(&mu, &nu).unwrap();
        let brute = (0..5)
            .permutations(5)
            .map(|p| naive_cost(&mu, &nu, &p))
            .fold(f64::INFINITY, f64::min);
        prop_assert!((plan.squared_cost - brute).abs() <= 1e-12);
    }
}

#[test]
fn mismatched_shapes_are_rejected() {
    let a = SparseMeasure::new(vec![vec![0.0], vec![1.0]]).unwrap();
    let b = SparseMeasure::new(vec![vec![0.0]]).unwrap();
    assert!(matches!(w2_squared(&a, &b), Err(Error::SizeMismatch { .. })));

    let c = SparseMeasure::new(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
    assert!(matches!(w2_squared(&a, &c), Err(Error::DimensionMismatch { .. })));
}

#[test]
fn known_crossing_pair() {
    // Straight pairing costs 2*25; crossing costs 2*16. The solver must cross.
    let mu = SparseMeasure::new(vec![vec![0.0, 0.0], vec![3.0, 0.0]]).unwrap();
    let nu = SparseMeasure::new(vec![vec![5.0, 0.0], vec![-1.0, 0.0]]).unwrap();
    let plan = optimal_plan(&mu, &nu).unwrap();
    assert_eq!(plan.permutation, vec![1, 0]);
    assert_eq!(plan.squared_cost, 5.0);
}

#[test]
fn many_particles_one_dimension_matches_sorted_pairing() {
    let mu = measure_from_fn(400, |i| (i as f64 * 0.7).sin() * 3.0);
    let nu = measure_from_fn(400, |i| (i as f64 * 1.3).cos() * 2.0);
    let got = w2_squared(&mu, &nu).unwrap();

    let mut a: Vec<f64> = mu.as_slice().to_vec();
    let mut b: Vec<f64> = nu.as_slice().to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let want: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum();
    assert!((got - want).abs() <= 1e-9 * (1.0 + want));
}

fn measure_from_fn(n: usize, f: impl Fn(usize) -> f64) -> SparseMeasure {
    SparseMeasure::new((0..n).map(|i| vec![f(i)]).collect()).unwrap()
}
