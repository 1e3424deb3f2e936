#![allow(dead_code)]

use displace::SparseMeasure;
use proptest::prelude::*;
use std::ops::RangeInclusive;

pub fn rows(
    n: RangeInclusive<usize>,
    d: usize,
    lo: f64,
    hi: f64,
) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(lo..hi, d), n)
}

pub fn measure(
    n: RangeInclusive<usize>,
    d: usize,
    lo: f64,
    hi: f64,
) -> impl Strategy<Value = SparseMeasure> {
    rows(n, d, lo, hi).prop_map(|r| SparseMeasure::new(r).unwrap())
}

/// Two measures with matching particle count and dimension.
pub fn measure_pair(
    ns: RangeInclusive<usize>,
    ds: RangeInclusive<usize>,
    lo: f64,
    hi: f64,
) -> impl Strategy<Value = (SparseMeasure, SparseMeasure)> {
    (ns, ds).prop_flat_map(move |(n, d)| {
        (rows(n..=n, d, lo, hi), rows(n..=n, d, lo, hi)).prop_map(|(a, b)| {
            (SparseMeasure::new(a).unwrap(), SparseMeasure::new(b).unwrap())
        })
    })
}

pub fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
