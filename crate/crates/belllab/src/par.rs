//! Execution helpers: data-parallel with the `parallel` feature (default),
//! plain iterators otherwise. Results are collected in index order either
//! way, so outputs are identical across thread counts and both builds.

/// Map `f` over `0..n`, collecting results in index order.
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
    map_indexed_seq(n, f)
}

/// Sequential twin of [`map_indexed`]; always compiled, used by the bench
/// suite as the baseline and by the non-parallel build as the implementation.
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).map(f).collect()
}

/// Cap the global thread pool. Call once, before any parallel work; later
/// calls fail harmlessly. No-op in the sequential build.
#[cfg(feature = "parallel")]
pub fn set_max_threads(n: usize) -> std::result::Result<(), String> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

#[cfg(not(feature = "parallel"))]
pub fn set_max_threads(_n: usize) -> std::result::Result<(), String> {
    Ok(())
}

/// Deterministic pairwise sum: fixed-size blocks are reduced independently
/// (possibly in parallel) and combined in block order, so the result does not
/// depend on the thread count.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    pairwise_sum_by(values.len(), |i| values[i])
}

/// Pairwise sum of `f(0) + … + f(n−1)` without materializing the terms.
pub fn pairwise_sum_by<F>(n: usize, f: F) -> f64
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    const BLOCK: usize = 4096;
    if n <= BLOCK {
        return sum_range(&f, 0, n);
    }
    let blocks = n.div_ceil(BLOCK);
    let partials = map_indexed(blocks, |b| {
        let lo = b * BLOCK;
        let hi = (lo + BLOCK).min(n);
        sum_range(&f, lo, hi)
    });
    sum_range(&|i| partials[i], 0, partials.len())
}

fn sum_range<F: Fn(usize) -> f64>(f: &F, lo: usize, hi: usize) -> f64 {
    match hi - lo {
        0 => 0.0,
        1 => f(lo),
        len => {
            let mid = lo + len / 2;
            sum_range(f, lo, mid) + sum_range(f, mid, hi)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_variants_agree() {
        let sq = |i: usize| i * i;
        assert_eq!(map_indexed(100, sq), map_indexed_seq(100, sq));
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let v: Vec<f64> = (0..10_000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), (10_000.0 * 9_999.0) / 2.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }
}
