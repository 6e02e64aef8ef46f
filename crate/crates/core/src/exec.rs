//! Data-parallel map helpers with a sequential fallback.
//!
//! Every parallel loop in the crate funnels through [`map_indexed`]: a map
//! over `0..n` collected in index order, followed by a sequential reduction
//! at the call site. Results are therefore identical with and without the
//! `parallel` feature. [`map_indexed_seq`] is always sequential and exists
//! so benchmarks can compare both paths in one build.

#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Sequential twin of [`map_indexed`].
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Index-order maximum; earlier index wins ties, so the reduction is
/// deterministic regardless of how the values were produced.
pub fn max_by_value<T: Copy + PartialOrd>(values: &[T]) -> Option<(usize, T)> {
    let mut best: Option<(usize, T)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, bv)| v > bv) {
            best = Some((i, v));
        }
    }
    best
}
