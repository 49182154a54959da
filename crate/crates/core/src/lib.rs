//! Simulation of scalar SDEs driven by fractional Brownian motion
//! (`1/2 < H < 1`) and least-squares estimation of their drift parameter
//! from discrete observations.
//!
//! Numerical routines are generic over [`Real`] (`f32` or `f64`); the
//! `*64` aliases below fix the scalar to `f64`.

pub mod contrast;
pub mod error;
pub mod fbm;
pub mod io;
pub mod limits;
mod linalg;
pub mod model;
pub mod rng;
pub mod scalar;
pub mod simulate;

pub use contrast::{
    asym_cov, c_const, estimate_lse, grad_qn, info_matrix, qn, rate_tau, AsymptoticLaw, EstimationResult, FouQuadratic,
    InfoEstimate, LimitConstants, OptConfig, SeriesConstant, VarianceConvention,
};
pub use error::{Error, Result};
pub use fbm::{
    cumulate, fbm_covariance, fgn_autocovariance, generate_fgn_cholesky, generate_fgn_circulant, CholeskyFgn,
    CirculantFgn, FgnSample, HurstIndex, Regime,
};
pub use limits::{
    ergodic_average, hermite_stat, lemma3_decomposition, weighted_increment_sum, Decomposition, HermiteStatResult,
};
pub use model::{
    validate_assumptions, CubicDrift, Drift, DriftRegistry, FouDrift, ProbeConfig, ThetaDomain, ValidationReport,
    ZeroDrift,
};
pub use scalar::Real;
pub use simulate::{check_moment_bounds, holder_norm, simulate_path, ObservedPath, PathSimulator, SamplingScheme};

pub type Hurst64 = HurstIndex<f64>;
pub type FgnSample64 = FgnSample<f64>;
pub type ObservedPath64 = ObservedPath<f64>;
pub type SamplingScheme64 = SamplingScheme<f64>;
pub type ThetaDomain64 = ThetaDomain<f64>;
pub type EstimationResult64 = EstimationResult<f64>;
pub type InfoEstimate64 = InfoEstimate<f64>;
pub type AsymptoticLaw64 = AsymptoticLaw<f64>;
pub type DriftRegistry64 = DriftRegistry<f64>;
pub type Decomposition64 = Decomposition<f64>;
pub type HermiteStatResult64 = HermiteStatResult<f64>;
