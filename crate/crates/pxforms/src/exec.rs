//! Data-parallel helpers with a sequential fallback.
//!
//! Parallelism is map-only: every map collects into an index-ordered `Vec`
//! and reductions are performed sequentially in that order afterwards, so
//! results are bit-identical for any thread count and for the sequential
//! build (`--no-default-features`).

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `0..n`, preserving index order.
#[cfg(feature = "parallel")]
pub fn map_collect<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).into_par_iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving index order.
#[cfg(not(feature = "parallel"))]
pub fn map_collect<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Sequential twin of [`map_collect`], kept unconditionally so benchmarks
/// can compare the two code paths within one build.
pub fn map_collect_seq<T, F: Fn(usize) -> T>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

/// Ordered sum; the fixed left-to-right association keeps totals
/// independent of how the terms were produced.
pub fn sum_ordered(terms: &[f64]) -> f64 {
    terms.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parallel_map_matches_sequential() {
        let f = |i: usize| (i as f64).sin() * (i as f64 + 0.5).sqrt();
        let a = map_collect(1000, f);
        let b = map_collect_seq(1000, f);
        assert_eq!(a, b);
        assert_eq!(sum_ordered(&a), sum_ordered(&b));
    }
}
