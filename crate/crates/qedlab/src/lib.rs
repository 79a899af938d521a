//! Experiment driver for `qedlab-core`: configuration files, figure presets,
//! parallel sweeps and CSV output with companion gnuplot scripts.

pub mod config;
pub mod error;
pub mod ground;
pub mod output;
pub mod points;
pub mod spectrum;
pub mod validate;

pub use config::{ConfigFile, Method, RunConfig};
pub use error::CliError;

/// Worker pool bounded by `QEDLAB_WORKERS` (all cores when unset).
pub fn worker_pool() -> Result<rayon::ThreadPool, CliError> {
    let n = match std::env::var("QEDLAB_WORKERS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| CliError::Config(format!("QEDLAB_WORKERS must be a positive integer, got `{v}`")))?,
        Err(_) => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))
}
