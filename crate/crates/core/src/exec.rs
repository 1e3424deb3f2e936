//! Work distribution with deterministic results.
//!
//! Every helper here produces output that is bitwise independent of thread
//! count: parallel maps write into index-ordered vectors and reductions fold
//! those vectors sequentially, so enabling or disabling the `parallel` feature
//! never changes a result, only wall-clock time. The `_seq` variants are always
//! compiled; they exist so benchmarks can compare both paths directly.

/// Below this many items the parallel dispatch falls back to the sequential
/// loop; per-item work in this crate is too small to amortize fork overhead.
const MIN_PAR_LEN: usize = 64;

pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Map `f` over `0..n`, output in index order.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if n < MIN_PAR_LEN {
        return map_indexed_seq(n, f);
    }
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_indexed_seq(n, f)
}

/// `map_indexed` for coarse items (whole optimizer runs): parallel from two
/// items up, since each item dwarfs fork overhead.
#[cfg(feature = "parallel")]
pub fn map_indexed_coarse<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if n < 2 {
        return map_indexed_seq(n, f);
    }
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed_coarse<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_indexed_seq(n, f)
}

pub fn sum_indexed_seq<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64,
{
    let mut acc = 0.0;
    for i in 0..n {
        acc += f(i);
    }
    acc
}

/// Sum of `f(i)` over `0..n`. Partial terms are materialized in index order and
/// folded sequentially, so the result matches `sum_indexed_seq` bitwise.
pub fn sum_indexed<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if n < MIN_PAR_LEN {
        return sum_indexed_seq(n, &f);
    }
    map_indexed(n, f).iter().sum()
}

pub fn argmin_indexed_seq<F>(n: usize, f: F) -> (usize, f64)
where
    F: Fn(usize) -> f64,
{
    assert!(n > 0, "argmin over empty range");
    let mut best = (0usize, f(0));
    for i in 1..n {
        let v = f(i);
        if v < best.1 {
            best = (i, v);
        }
    }
    best
}

/// Index and value minimizing `f` over `0..n`; ties resolve to the lowest
/// index, which makes the reduction order-independent.
#[cfg(feature = "parallel")]
pub fn argmin_indexed<F>(n: usize, f: F) -> (usize, f64)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    use rayon::prelude::*;
    assert!(n > 0, "argmin over empty range");
    if n < MIN_PAR_LEN {
        return argmin_indexed_seq(n, f);
    }
    (0..n)
        .into_par_iter()
        .map(|i| (i, f(i)))
        .reduce_with(|a, b| if b.1 < a.1 || (b.1 == a.1 && b.0 < a.0) { b } else { a })
        .expect("non-empty range")
}

#[cfg(not(feature = "parallel"))]
pub fn argmin_indexed<F>(n: usize, f: F) -> (usize, f64)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    argmin_indexed_seq(n, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_and_sequential_sums_agree_bitwise() {
        // Values with spread magnitudes so accumulation order would show up.
        let f = |i: usize| ((i * 2654435761 % 1000) as f64).exp2() * 1e-30 + i as f64;
        for n in [0, 1, 63, 64, 65, 1000] {
            assert_eq!(sum_indexed(n, f).to_bits(), sum_indexed_seq(n, f).to_bits());
        }
    }

    #[test]
    fn argmin_breaks_ties_toward_lowest_index() {
        let f = |i: usize| if i % 7 == 3 { -1.0 } else { i as f64 };
        assert_eq!(argmin_indexed(1000, f), (3, -1.0));
        assert_eq!(argmin_indexed_seq(1000, f), (3, -1.0));
    }
}
