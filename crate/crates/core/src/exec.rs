//! Index-ordered parallel map with a sequential fallback.

/// f(0), …, f(n−1) in index order. Runs on the rayon pool when the
/// `parallel` feature is on and `parallel` is true.
pub(crate) fn map_indices<T, F>(n: usize, parallel: bool, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = parallel;
    (0..n).map(f).collect()
}
