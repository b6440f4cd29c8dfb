//! Data-parallel kernels with a sequential fallback.
//!
//! With the `parallel` feature (on by default) these fan out over rayon;
//! without it they are plain loops. Every call site maps independent chunks
//! of output from read-only input, so both paths produce identical results.

#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}

/// Builds a row-major buffer from a per-row producer.
#[cfg(feature = "parallel")]
pub(crate) fn flat_rows<T, F>(n_rows: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> Vec<T> + Sync + Send,
{
    use rayon::prelude::*;
    let rows: Vec<Vec<T>> = (0..n_rows).into_par_iter().map(f).collect();
    rows.into_iter().flatten().collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn flat_rows<T, F>(n_rows: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> Vec<T>,
{
    let mut out = Vec::new();
    for i in 0..n_rows {
        out.extend(f(i));
    }
    out
}
