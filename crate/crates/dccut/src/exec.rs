//! Std-side implementations of the core's [`Clock`] and [`Executor`] hooks.

use std::time::Instant;

use dccut_core::{Clock, Executor};
use rayon::prelude::*;
use rayon::{ThreadPool, ThreadPoolBuildError, ThreadPoolBuilder};

/// Wall-clock time since construction.
#[derive(Debug, Clone, Copy)]
pub struct WallClock {
    start: Instant,
}

impl WallClock {
    pub fn start() -> Self {
        Self {
            start: Instant::now(),
        }
    }
}

impl Default for WallClock {
    fn default() -> Self {
        Self::start()
    }
}

impl Clock for WallClock {
    fn elapsed_secs(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }
}

/// Runs worker tasks on a dedicated rayon pool. Results come back in task
/// order, so merges stay deterministic regardless of scheduling.
pub struct RayonExecutor {
    pool: ThreadPool,
}

impl RayonExecutor {
    pub fn new(threads: usize) -> Result<Self, ThreadPoolBuildError> {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .thread_name(|i| format!("dccut-worker-{i}"))
            .build()?;
        Ok(Self { pool })
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map<T, R, F>(&self, tasks: Vec<T>, f: F) -> Vec<R>
    where
        T: Send,
        R: Send,
        F: Fn(T) -> R + Sync,
    {
        let f = &f;
        self.pool.install(|| tasks.into_par_iter().map(f).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn results_keep_task_order() {
        let exec = RayonExecutor::new(4).unwrap();
        let out = exec.map((0..1000).collect(), |i: u64| i * i);
        assert_eq!(out, (0..1000).map(|i| i * i).collect::<Vec<_>>());
        assert_eq!(exec.threads(), 4);
    }

    #[test]
    fn wall_clock_advances() {
        let c = WallClock::start();
        let a = c.elapsed_secs();
        std::thread::sleep(std::time::Duration::from_millis(5));
        assert!(c.elapsed_secs() > a);
    }
}
