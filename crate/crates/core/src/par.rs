//! Data-parallel helpers with a sequential fallback.
//!
//! With the `rayon` feature (default) [`Exec::Parallel`] maps through the
//! rayon pool; without it every mode runs sequentially. Results always come
//! back in input order, so reductions over them are bit-stable.

#[cfg(feature = "rayon")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "rayon")]
            Exec::Parallel => items.par_iter().map(f).collect(),
            _ => items.iter().map(f).collect(),
        }
    }

    pub fn map_range<R, F>(self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match self {
            #[cfg(feature = "rayon")]
            Exec::Parallel => (0..n).into_par_iter().map(f).collect(),
            _ => (0..n).map(f).collect(),
        }
    }
}

/// Caps the global worker pool from `MTTRACK_THREADS` when set.
///
/// Returns the configured thread count, or `None` when the variable is absent
/// or the pool was already initialised.
pub fn init_from_env() -> Option<usize> {
    let n: usize = std::env::var("MTTRACK_THREADS").ok()?.trim().parse().ok()?;
    let n = n.max(1);
    #[cfg(feature = "rayon")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .ok()?;
    }
    Some(n)
}
