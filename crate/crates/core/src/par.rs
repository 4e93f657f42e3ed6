//! Data-parallel helpers.
//!
//! With the `parallel` feature, work is spread over the rayon pool unless
//! [`set_parallel(false)`](set_parallel) has been called. Results always come
//! back in input order, so callers see the same output either way.

use std::sync::atomic::{AtomicBool, Ordering};

static ENABLED: AtomicBool = AtomicBool::new(true);

/// Switches between the rayon pool and plain iteration at runtime.
pub fn set_parallel(on: bool) {
    ENABLED.store(on, Ordering::Relaxed);
}

pub fn parallel_enabled() -> bool {
    cfg!(feature = "parallel") && ENABLED.load(Ordering::Relaxed)
}

pub fn par_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Index of the first item (in input order) for which `f` returns `Some`,
/// together with that value.
pub fn par_find_first<T, R, F>(items: &[T], f: F) -> Option<(usize, R)>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if parallel_enabled() {
        use rayon::prelude::*;
        return items
            .par_iter()
            .enumerate()
            .filter_map(|(i, x)| f(x).map(|r| (i, r)))
            .min_by_key(|(i, _)| *i);
    }
    items.iter().enumerate().find_map(|(i, x)| f(x).map(|r| (i, r)))
}
