use thiserror::Error;

/// Errors raised by the core routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("resource limit: {what} = {requested} exceeds cap {cap}")]
    Resource {
        what: &'static str,
        requested: usize,
        cap: usize,
    },

    #[error("circulant embedding has eigenvalue {min} below tolerance -{tolerance}")]
    NegativeEigenvalue { min: f64, tolerance: f64 },

    #[error("internal numerical failure: {0}")]
    Internal(String),

    #[error("simulation blew up at fine step {step} (|X| = {value:e})")]
    SimulationBlowup { step: usize, value: f64 },

    #[error("optimization failed: {0}")]
    Optimization(String),

    #[error("series for c_H diverges at H = {hurst}; use the log-regime constant 9/16 for H = 3/4")]
    Divergence { hurst: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is singular")]
    Singular,

    #[error("malformed input at row {row}: {message}")]
    Parse { row: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
