//! Monte Carlo harness for the least-squares drift estimator: replicated
//! consistency, normality, Hermite-regime and ergodic studies with
//! deterministic seeding and worker-count-independent output.

pub mod config;
pub mod error;
pub mod output;
pub mod stats;
pub mod study;

pub use config::{StudyConfig, StudyKind};
pub use error::{McError, Result};
pub use stats::{ks_test, ks_two_sample, KsResult};
pub use study::{
    replicate_seed, run_consistency_study, run_ergodic_study, run_hermite_fgn_study, run_hermite_regime_study,
    run_normality_study, run_study, StudyResult,
};
