use std::sync::Arc;

use fraclse_core::contrast::OptConfig;
use fraclse_core::{Drift, DriftRegistry64, HurstIndex, Regime, SamplingScheme, ThetaDomain, VarianceConvention};
use serde::{Deserialize, Serialize};

use crate::error::{McError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StudyKind {
    /// Median estimation error across the `n` grid.
    Consistency,
    /// Distribution of `ζ` against the Gaussian limit (`H <= 3/4`).
    Normality,
    /// Distribution of `ζ` for `H > 3/4`.
    Hermite,
    /// Normalised quadratic variation of pure fGn, no estimation.
    HermiteFgn,
    /// Weighted increment sums and ergodic averages along simulated paths.
    Ergodic,
}

impl StudyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            StudyKind::Consistency => "consistency",
            StudyKind::Normality => "normality",
            StudyKind::Hermite => "hermite",
            StudyKind::HermiteFgn => "hermite-fgn",
            StudyKind::Ergodic => "ergodic",
        }
    }
}

fn default_substeps() -> usize {
    fraclse_core::simulate::DEFAULT_SUBSTEPS
}
fn default_burn_in() -> f64 {
    20.0
}
fn default_aux_steps() -> usize {
    1_000_000
}
fn default_aux_dt() -> f64 {
    0.01
}
fn default_aux_burn_in() -> f64 {
    50.0
}
fn default_drift() -> String {
    "fou".into()
}

/// Box `Θ` given explicitly in a configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainConfig {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// Everything a study needs. `theta0`, `sigma`, `hurst`, `kappa` and `alpha`
/// have no defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StudyConfig {
    pub study: StudyKind,
    #[serde(default = "default_drift")]
    pub drift: String,
    pub theta0: Vec<f64>,
    pub sigma: f64,
    pub hurst: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub n_list: Vec<usize>,
    pub replicates: usize,
    pub master_seed: u64,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    /// Time span simulated and discarded before the first observation.
    #[serde(default = "default_burn_in")]
    pub burn_in: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub convention: VarianceConvention,
    /// Worker threads; `None` leaves the choice to the caller.
    #[serde(default)]
    pub threads: Option<usize>,
    /// Length of the auxiliary stationary run used for `Î`.
    #[serde(default = "default_aux_steps")]
    pub aux_steps: usize,
    #[serde(default = "default_aux_dt")]
    pub aux_dt: f64,
    #[serde(default = "default_aux_burn_in")]
    pub aux_burn_in: f64,
    /// Negative control: permute the fine noise, destroying its dependence.
    #[serde(default)]
    pub shuffle_noise: bool,
    #[serde(default)]
    pub domain: Option<DomainConfig>,
    #[serde(default)]
    pub optimizer: OptConfig,
}

/// A validated configuration with resolved drift, domain and Hurst index.
pub struct ResolvedStudy {
    pub config: StudyConfig,
    pub drift: Arc<dyn Drift<f64>>,
    pub domain: ThetaDomain<f64>,
    pub hurst: HurstIndex<f64>,
}

impl StudyConfig {
    pub fn scheme(&self, n: usize) -> Result<SamplingScheme<f64>> {
        Ok(SamplingScheme::new(n, self.kappa, self.alpha, self.substeps)?)
    }

    /// Checks the configuration against the requested study and resolves names.
    pub fn resolve(&self) -> Result<ResolvedStudy> {
        self.resolve_with(&DriftRegistry64::with_builtins())
    }

    pub fn resolve_with(&self, registry: &DriftRegistry64) -> Result<ResolvedStudy> {
        let hurst = HurstIndex::new(self.hurst)?.require_estimation_range()?;
        if self.n_list.is_empty() {
            return Err(McError::Config("n_list is empty".into()));
        }
        if let Some(&bad) = self.n_list.iter().find(|&&n| n < 2) {
            return Err(McError::Config(format!("every n must be at least 2, got {bad}")));
        }
        if self.replicates == 0 {
            return Err(McError::Config("replicates must be at least 1".into()));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(McError::Config(format!(
                "sigma must be finite and non-negative, got {}",
                self.sigma
            )));
        }
        if !(self.burn_in >= 0.0) || !(self.aux_dt > 0.0) || !(self.aux_burn_in >= 0.0) {
            return Err(McError::Config(
                "burn_in and aux_burn_in must be >= 0 and aux_dt > 0".into(),
            ));
        }
        if self.threads == Some(0) {
            return Err(McError::Config("threads must be at least 1".into()));
        }
        let drift = registry.get(&self.drift)?;
        if self.theta0.len() != drift.dim() {
            return Err(McError::Config(format!(
                "theta0 has {} components but drift '{}' has dimension {}",
                self.theta0.len(),
                self.drift,
                drift.dim()
            )));
        }
        let domain = match &self.domain {
            Some(d) => ThetaDomain::new(d.lower.clone(), d.upper.clone())?,
            None => drift.default_domain(),
        };
        if domain.dim() != drift.dim() {
            return Err(McError::Config("domain dimension does not match the drift".into()));
        }
        if !domain.contains(&self.theta0) {
            return Err(McError::Config(format!(
                "theta0 = {:?} lies outside the parameter box",
                self.theta0
            )));
        }
        for &n in &self.n_list {
            let scheme = self.scheme(n)?;
            match self.study {
                StudyKind::Consistency | StudyKind::Ergodic => scheme.check_consistency_regime(hurst)?,
                StudyKind::Normality | StudyKind::Hermite => scheme.check_normality_regime(hurst)?,
                StudyKind::HermiteFgn => {}
            }
        }
        match (self.study, hurst.regime()) {
            (StudyKind::Normality, Regime::Hermite) => {
                return Err(McError::Regime(format!(
                    "H = {} > 3/4 has a non-Gaussian limit; use the 'hermite' study",
                    self.hurst
                )))
            }
            (StudyKind::Hermite, Regime::Gaussian | Regime::Log) => {
                return Err(McError::Regime(format!(
                    "H = {} <= 3/4 has a Gaussian limit; use the 'normality' study",
                    self.hurst
                )))
            }
            _ => {}
        }
        Ok(ResolvedStudy {
            config: self.clone(),
            drift,
            domain,
            hurst,
        })
    }
}
