//! Data-parallel replication helpers.
//!
//! With the `parallel` feature the default mode maps work items on the rayon
//! pool; without it, or when [`Execution::Sequential`] is selected, the same
//! closures run on a plain iterator. Results are always collected in index
//! order, so reductions over them are reproducible.

use std::sync::atomic::{AtomicU8, Ordering};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    Parallel,
}

const UNSET: u8 = 0;
const SEQ: u8 = 1;
const PAR: u8 = 2;

static MODE: AtomicU8 = AtomicU8::new(UNSET);

impl Execution {
    /// Process-wide mode used by the replication loops.
    pub fn current() -> Execution {
        match MODE.load(Ordering::Relaxed) {
            SEQ => Execution::Sequential,
            PAR if cfg!(feature = "parallel") => Execution::Parallel,
            PAR => Execution::Sequential,
            _ => Execution::default(),
        }
    }

    pub fn set_current(mode: Execution) {
        let v = match mode {
            Execution::Sequential => SEQ,
            Execution::Parallel => PAR,
        };
        MODE.store(v, Ordering::Relaxed);
    }
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

/// Maps `f` over `0..n` and returns the results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_indexed_with(Execution::current(), n, f)
}

pub fn map_indexed_with<T, F>(mode: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match mode {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(f).collect()
        }
        _ => (0..n).map(f).collect(),
    }
}

/// Like [`map_indexed`] for fallible work; the first error in index order wins.
pub fn try_map_indexed<T, E, F>(n: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(usize) -> Result<T, E> + Sync + Send,
{
    map_indexed(n, f).into_iter().collect()
}

/// Configures the global rayon pool. Has no effect without the `parallel` feature
/// or when the pool was already built.
pub fn set_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modes_agree() {
        let f = |i: usize| (i as f64).sqrt() * 3.0;
        let a = map_indexed_with(Execution::Sequential, 1000, f);
        let b = map_indexed_with(Execution::Parallel, 1000, f);
        assert_eq!(a, b);
    }
}
