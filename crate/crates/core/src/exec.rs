//! Execution strategy for the data-parallel inner loops.
//!
//! Sampling-based verification, sign-matrix enumeration and kernel assembly
//! all map an index range through a pure function. With the `parallel`
//! feature (on by default) those maps run on the rayon thread pool; without
//! it they run sequentially. Results are identical either way: every map is
//! keyed by index, so no outcome depends on scheduling.
//!
//! Parallelism can also be switched off at runtime, which is what the
//! benchmarks use to compare both paths inside a single build.

#[cfg(feature = "parallel")]
use std::sync::atomic::{AtomicBool, Ordering};

#[cfg(feature = "parallel")]
static PARALLEL_ENABLED: AtomicBool = AtomicBool::new(true);

/// Returns whether the parallel path is currently active.
pub fn parallel_enabled() -> bool {
    #[cfg(feature = "parallel")]
    {
        PARALLEL_ENABLED.load(Ordering::Relaxed)
    }
    #[cfg(not(feature = "parallel"))]
    {
        false
    }
}

/// Enables or disables the parallel path at runtime.
///
/// A no-op when the crate is built without the `parallel` feature.
pub fn set_parallel_enabled(enabled: bool) {
    #[cfg(feature = "parallel")]
    PARALLEL_ENABLED.store(enabled, Ordering::Relaxed);
    #[cfg(not(feature = "parallel"))]
    let _ = enabled;
}

/// Maps `0..count` through `f`, preserving index order in the output.
pub(crate) fn map_indices<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return (0..count).into_par_iter().map(f).collect();
    }
    (0..count).map(f).collect()
}

/// Sums `f(i)` over `0..count` pairwise across chunks.
///
/// Used by the sign-matrix census where materialising one value per index
/// would be wasteful.
pub(crate) fn sum_indices<F>(count: u64, f: F) -> u64
where
    F: Fn(u64) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        let chunk = (count / 256).max(1 << 12);
        let starts: Vec<u64> = (0..count).step_by(chunk as usize).collect();
        return starts
            .into_par_iter()
            .map(|start| {
                let end = (start + chunk).min(count);
                (start..end).map(&f).sum::<u64>()
            })
            .sum();
    }
    (0..count).map(f).sum()
}
