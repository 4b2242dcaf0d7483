//! Fixed-size worker pool shared by the data-parallel stages.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Environment variable consulted when no explicit worker count is given.
pub const WORKERS_ENV: &str = "TRAJFORGE_WORKERS";

/// A fixed-size pool of worker threads.
///
/// A pool of one worker runs everything inline on the calling thread, which
/// is also what the compressor uses for per-trajectory tasks that are
/// already running on a pool thread.
pub struct WorkerPool {
    pool: Option<rayon::ThreadPool>,
    workers: usize,
}

impl std::fmt::Debug for WorkerPool {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WorkerPool").field("workers", &self.workers).finish()
    }
}

impl WorkerPool {
    pub fn new(workers: usize) -> Result<Self> {
        if workers == 0 {
            return Err(Error::Pool("worker count must be at least 1".into()));
        }
        if workers == 1 {
            return Ok(Self::sequential());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .thread_name(|i| format!("trajforge-{i}"))
            .build()
            .map_err(|e| Error::Pool(e.to_string()))?;
        Ok(WorkerPool {
            pool: Some(pool),
            workers,
        })
    }

    /// A pool that runs everything on the calling thread.
    pub const fn sequential() -> Self {
        WorkerPool {
            pool: None,
            workers: 1,
        }
    }

    pub fn workers(&self) -> usize {
        self.workers
    }

    pub fn is_sequential(&self) -> bool {
        self.pool.is_none()
    }

    pub(crate) fn rayon(&self) -> Option<&rayon::ThreadPool> {
        self.pool.as_ref()
    }

    /// Index of the calling pool thread, if called from inside the pool.
    pub fn current_worker(&self) -> Option<usize> {
        self.pool.as_ref().and_then(|p| p.current_thread_index())
    }

    /// Runs `op` inside the pool so rayon iterators within it use the pool's
    /// threads.
    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        match &self.pool {
            Some(p) => p.install(op),
            None => op(),
        }
    }

    /// Calls `f(chunk_index, chunk)` for every `chunk_len`-sized chunk of
    /// `data`, in parallel when the pool has more than one worker.
    pub fn for_each_chunk_mut<T, F>(&self, data: &mut [T], chunk_len: usize, f: F)
    where
        T: Send,
        F: Fn(usize, &mut [T]) + Sync + Send,
    {
        assert!(chunk_len > 0);
        match &self.pool {
            Some(p) if data.len() > chunk_len => p.install(|| {
                data.par_chunks_mut(chunk_len)
                    .enumerate()
                    .for_each(|(i, c)| f(i, c));
            }),
            _ => data.chunks_mut(chunk_len).enumerate().for_each(|(i, c)| f(i, c)),
        }
    }

    /// Like [`for_each_chunk_mut`](Self::for_each_chunk_mut) over two slices
    /// chunked in lockstep.
    pub fn for_each_chunk_mut2<A, B, F>(&self, a: &mut [A], b: &mut [B], chunk_len: usize, f: F)
    where
        A: Send,
        B: Send,
        F: Fn(usize, &mut [A], &mut [B]) + Sync + Send,
    {
        assert!(chunk_len > 0);
        assert_eq!(a.len(), b.len());
        match &self.pool {
            Some(p) if a.len() > chunk_len => p.install(|| {
                a.par_chunks_mut(chunk_len)
                    .zip(b.par_chunks_mut(chunk_len))
                    .enumerate()
                    .for_each(|(i, (x, y))| f(i, x, y));
            }),
            _ => a
                .chunks_mut(chunk_len)
                .zip(b.chunks_mut(chunk_len))
                .enumerate()
                .for_each(|(i, (x, y))| f(i, x, y)),
        }
    }

    /// Maps `0..n` through `f`, in parallel, preserving order.
    pub fn map_range<R, F>(&self, n: usize, f: F) -> Vec<R>
    where
        R: Send,
        F: Fn(usize) -> R + Sync + Send,
    {
        match &self.pool {
            Some(p) if n > 1 => p.install(|| (0..n).into_par_iter().map(f).collect()),
            _ => (0..n).map(f).collect(),
        }
    }
}

/// Worker count from an explicit value, then [`WORKERS_ENV`], then the number
/// of logical CPUs.
pub fn resolve_workers(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(WORKERS_ENV).ok().and_then(|v| v.trim().parse().ok()))
        .filter(|&w| w > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_workers_rejected() {
        assert!(WorkerPool::new(0).is_err());
    }

    #[test]
    fn chunks_visit_everything_once() {
        for workers in [1, 3] {
            let pool = WorkerPool::new(workers).unwrap();
            let mut v = vec![0u32; 1000];
            pool.for_each_chunk_mut(&mut v, 64, |i, c| {
                for x in c.iter_mut() {
                    *x += 1 + i as u32;
                }
            });
            assert!(v.iter().enumerate().all(|(j, &x)| x == 1 + (j / 64) as u32));
        }
    }

    #[test]
    fn map_range_preserves_order() {
        let pool = WorkerPool::new(4).unwrap();
        assert_eq!(pool.map_range(10, |i| i * i), (0..10).map(|i| i * i).collect::<Vec<_>>());
    }

    #[test]
    fn explicit_workers_win() {
        assert_eq!(resolve_workers(Some(3)), 3);
        assert!(resolve_workers(None) >= 1);
    }
}
