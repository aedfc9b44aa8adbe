//! Data-parallel map over independent jobs.
//!
//! With the `parallel` feature (default) jobs run on a rayon pool;
//! otherwise, and always through [`map_sequential`], they run in order on
//! the calling thread. Results come back in job order either way, so
//! output never depends on the worker count.

/// Runs `f` over `jobs` on the calling thread.
pub fn map_sequential<J, T, F>(jobs: Vec<J>, f: F) -> Vec<T>
where
    F: Fn(J) -> T,
{
    jobs.into_iter().map(f).collect()
}

/// Runs `f` over `jobs` on `workers` threads (0 lets rayon decide).
#[cfg(feature = "parallel")]
pub fn map_parallel<J, T, F>(jobs: Vec<J>, workers: usize, f: F) -> Vec<T>
where
    J: Send,
    T: Send,
    F: Fn(J) -> T + Sync + Send,
{
    use rayon::prelude::*;
    if workers == 1 {
        return map_sequential(jobs, f);
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(|| jobs.into_par_iter().map(&f).collect()),
        Err(_) => jobs.into_par_iter().map(f).collect(),
    }
}

/// Parallel when the `parallel` feature is enabled, sequential otherwise.
pub fn map_jobs<J, T, F>(jobs: Vec<J>, workers: usize, f: F) -> Vec<T>
where
    J: Send,
    T: Send,
    F: Fn(J) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_parallel(jobs, workers, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        map_sequential(jobs, f)
    }
}
