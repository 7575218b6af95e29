use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Caps the worker threads used for grid evaluation; 0 or unset means automatic.
pub const THREADS_ENV: &str = "AMPSHIELD_THREADS";

pub fn threads_from_env() -> CliResult<usize> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(0),
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::config("AMPSHIELD_THREADS", format!("`{v}` is not a thread count"))),
    }
}

/// Evaluates `f` on every item in a dedicated pool, keeping input order.
pub fn ordered_map<T, U, F>(threads: usize, items: &[T], f: F) -> CliResult<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> CliResult<U> + Sync,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::config("AMPSHIELD_THREADS", e.to_string()))?;
    pool.install(|| items.par_iter().map(&f).collect())
}
