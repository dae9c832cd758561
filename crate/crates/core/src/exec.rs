//! Execution strategy for the data-parallel kernels.
//!
//! With the `parallel` feature (on by default) `Exec::Parallel` runs on the
//! rayon global pool. Without it every strategy degrades to the sequential
//! loop, so callers never need to cfg-gate.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many elements the parallel kernels stay sequential.
pub(crate) const PAR_MIN_LEN: usize = 1 << 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Exec {
    Sequential,
    #[default]
    Parallel,
}

impl Exec {
    /// True when work will actually be spread over threads.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Exec::Parallel
    }

    #[cfg_attr(not(feature = "parallel"), allow(dead_code))]
    pub(crate) fn wide(self, len: usize) -> bool {
        self.is_parallel() && len >= PAR_MIN_LEN
    }

    /// Order-preserving map over independent items.
    pub fn map<T, R, F>(self, items: &[T], f: F) -> Vec<R>
    where
        T: Sync,
        R: Send,
        F: Fn(&T) -> R + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            return items.par_iter().map(f).collect();
        }
        items.iter().map(f).collect()
    }

    /// Apply `f` to each fixed-size chunk of `data` together with the chunk index.
    pub(crate) fn for_chunks<T, F>(self, data: &mut [T], chunk: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.wide(data.len()) && data.len() > chunk {
            data.par_chunks_mut(chunk).enumerate().for_each(|(i, c)| f(i, c));
            return;
        }
        for (i, c) in data.chunks_mut(chunk).enumerate() {
            f(i, c);
        }
    }
}
