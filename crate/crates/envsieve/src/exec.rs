//! Block-parallel execution helpers.
//!
//! Every scan is split into fixed blocks *before* any threading decision,
//! block results are collected in block order, and float reductions fold
//! that ordered list pairwise. Thread count therefore never changes a
//! result; the `parallel` feature only changes how fast it appears. The
//! `_seq` twins are compiled in every build so benches can compare paths.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Default block length for scans over `n`.
pub const DEFAULT_BLOCK: u64 = 1 << 18;

/// Deterministic pairwise sum; rounding error grows like O(log n).
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => pairwise_sum(&xs[..n / 2]) + pairwise_sum(&xs[n / 2..]),
    }
}

fn blocks(start: u64, end: u64, block: u64) -> Vec<(u64, u64)> {
    assert!(block > 0, "block length must be positive");
    let mut v = Vec::new();
    let mut lo = start;
    while lo < end {
        let hi = end.min(lo + block);
        v.push((lo, hi));
        lo = hi;
    }
    v
}

/// Apply `f` to each block of `[start, end)`; results in block order.
pub fn map_blocks<T, F>(start: u64, end: u64, block: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64, u64) -> T + Sync,
{
    let bs = blocks(start, end, block);
    #[cfg(feature = "parallel")]
    {
        bs.par_iter().map(|&(lo, hi)| f(lo, hi)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        bs.iter().map(|&(lo, hi)| f(lo, hi)).collect()
    }
}

/// Sequential twin of [`map_blocks`].
pub fn map_blocks_seq<T, F>(start: u64, end: u64, block: u64, f: F) -> Vec<T>
where
    F: Fn(u64, u64) -> T,
{
    blocks(start, end, block)
        .iter()
        .map(|&(lo, hi)| f(lo, hi))
        .collect()
}

/// Pairwise-summed block scan over `[start, end)`.
pub fn sum_blocks<F>(start: u64, end: u64, block: u64, f: F) -> f64
where
    F: Fn(u64, u64) -> f64 + Sync,
{
    pairwise_sum(&map_blocks(start, end, block, f))
}

/// Sequential twin of [`sum_blocks`].
pub fn sum_blocks_seq<F>(start: u64, end: u64, block: u64, f: F) -> f64
where
    F: Fn(u64, u64) -> f64,
{
    pairwise_sum(&map_blocks_seq(start, end, block, f))
}

/// Map over slice items; output order equals input order.
pub fn map_items<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(&f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(&f).collect()
    }
}

/// Sequential twin of [`map_items`].
pub fn map_items_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(&f).collect()
}
