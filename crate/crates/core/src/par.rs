//! Order-preserving map used by every data-parallel loop in the crate.
//!
//! Output order always matches input order, and callers reduce the
//! collected vector sequentially, so the feature flag and the runtime
//! switch never change results.

#[cfg(feature = "parallel")]
pub(crate) fn map<T, U, F>(items: &[T], parallel: bool, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    use rayon::prelude::*;
    if parallel && items.len() > 1 {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map<T, U, F>(items: &[T], _parallel: bool, f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    items.iter().map(f).collect()
}

/// Whether this build can run anything in parallel at all.
pub const fn available() -> bool {
    cfg!(feature = "parallel")
}
