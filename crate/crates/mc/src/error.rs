use thiserror::Error;

#[derive(Debug, Error)]
pub enum McError {
    #[error(transparent)]
    Core(#[from] fraclse_core::Error),

    #[error("invalid study configuration: {0}")]
    Config(String),

    #[error("regime mismatch: {0}")]
    Regime(String),

    #[error("{failed} of {attempted} replicates failed (limit 2%); first failure: {first}")]
    FailureRate {
        failed: usize,
        attempted: usize,
        first: String,
    },

    #[error("thread pool: {0}")]
    ThreadPool(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, McError>;
