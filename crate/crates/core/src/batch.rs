//! Data-parallel evaluation of independent work items.
//!
//! With the `parallel` feature (default) [`map`] fans out over the rayon
//! thread pool; without it, it runs sequentially. Results always come back in
//! input order.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::Result;
use crate::verdict::Verdict;
use crate::verify::{verify_cso, Algorithm, Config, CsoInstance};

pub fn map_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map_parallel<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    items.par_iter().map(f).collect()
}

#[cfg(feature = "parallel")]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_parallel(items, f)
}

#[cfg(not(feature = "parallel"))]
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_sequential(items, f)
}

/// Verifies current-state opacity of every instance.
pub fn verify_cso_batch(instances: &[CsoInstance], algorithm: Algorithm, config: &Config) -> Vec<Result<Verdict>> {
    map(instances, |inst| verify_cso(inst, algorithm, config))
}
