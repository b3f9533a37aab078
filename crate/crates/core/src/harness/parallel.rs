use rayon::prelude::*;

/// Environment variable selecting the number of worker threads.
pub const WORKERS_ENV: &str = "SESSC_WORKERS";

/// Worker count from [`WORKERS_ENV`]; 1 (sequential) when unset or invalid.
pub fn workers_from_env() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&w| w > 0)
        .unwrap_or(1)
}

/// Order-preserving map; runs on the current rayon pool when `workers > 1`.
pub(crate) fn par_map<T, R, F>(workers: usize, items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync + Send,
{
    if workers <= 1 {
        items.into_iter().map(f).collect()
    } else {
        items.into_par_iter().map(f).collect()
    }
}

/// Runs `op` inside a dedicated pool of `workers` threads.
pub(crate) fn with_pool<R: Send>(workers: usize, op: impl FnOnce() -> R + Send) -> R {
    if workers <= 1 {
        return op();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(op),
        Err(e) => {
            log::warn!("could not start {workers} workers ({e}); running sequentially");
            op()
        }
    }
}
