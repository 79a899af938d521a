use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error("{0}: {1}")]
    Io(PathBuf, #[source] std::io::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Core(#[from] qedlab_core::Error),

    #[error("{failed} of {total} points failed")]
    PointsFailed { failed: usize, total: usize },
}
