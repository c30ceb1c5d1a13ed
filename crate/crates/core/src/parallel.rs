//! Data-parallel map with a sequential fallback.
//!
//! Compiled with the `parallel` feature (the default), `map_indexed` fans out
//! over a rayon pool; without it, the same API runs a plain sequential loop.
//! Results are collected in index order either way, and all randomness is
//! stream-addressed, so output bytes are identical across `jobs` settings and
//! across the two build flavors.

/// Apply `f` to `0..n` and collect results in index order.
///
/// `jobs` semantics: `1` runs strictly sequentially on the calling thread,
/// `0` uses the default rayon pool, and any other value builds a scoped pool
/// with that many threads. Without the `parallel` feature every setting runs
/// sequentially.
#[cfg(feature = "parallel")]
pub fn map_indexed<T, F>(n: usize, jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    use rayon::prelude::*;
    if jobs == 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let run = || (0..n).into_par_iter().map(&f).collect();
    if jobs == 0 {
        run()
    } else {
        match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            Ok(pool) => pool.install(run),
            Err(_) => (0..n).map(f).collect(),
        }
    }
}

#[cfg(not(feature = "parallel"))]
pub fn map_indexed<T, F>(n: usize, _jobs: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    (0..n).map(f).collect()
}
