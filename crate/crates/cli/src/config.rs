use std::path::Path;
use std::sync::Arc;

use fraclse_core::contrast::OptConfig;
use fraclse_core::simulate::DEFAULT_SUBSTEPS;
use fraclse_core::{Drift, DriftRegistry64, HurstIndex, SamplingScheme, ThetaDomain, VarianceConvention};
use fraclse_mc::config::DomainConfig;
use fraclse_mc::StudyConfig;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

fn default_drift() -> String {
    "fou".into()
}
fn default_substeps() -> usize {
    DEFAULT_SUBSTEPS
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

/// Model and sampling settings for `simulate`, `estimate` and `constants`.
/// `theta0`, `sigma`, `hurst`, `kappa`, `alpha` and `n` have no defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    #[serde(default = "default_drift")]
    pub drift: String,
    pub theta0: Vec<f64>,
    pub sigma: f64,
    pub hurst: f64,
    pub kappa: f64,
    pub alpha: f64,
    pub n: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    #[serde(default = "default_burn_in")]
    pub burn_in: f64,
    #[serde(default)]
    pub x0: f64,
    #[serde(default)]
    pub convention: VarianceConvention,
    #[serde(default)]
    pub domain: Option<DomainConfig>,
    #[serde(default)]
    pub optimizer: OptConfig,
    #[serde(default = "default_aux_steps")]
    pub aux_steps: usize,
    #[serde(default = "default_aux_dt")]
    pub aux_dt: f64,
    #[serde(default = "default_aux_burn_in")]
    pub aux_burn_in: f64,
}

/// A `ModelConfig` with names resolved and assumption A3 checked.
pub struct ResolvedModel {
    pub drift: Arc<dyn Drift<f64>>,
    pub domain: ThetaDomain<f64>,
    pub hurst: HurstIndex<f64>,
    pub scheme: SamplingScheme<f64>,
}

impl ModelConfig {
    pub fn resolve(&self) -> Result<ResolvedModel> {
        let cfg = |e: fraclse_core::Error| CliError::Config(e.to_string());
        let hurst = HurstIndex::new(self.hurst)
            .and_then(|h| h.require_estimation_range())
            .map_err(cfg)?;
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(CliError::Config(format!(
                "sigma must be finite and non-negative, got {}",
                self.sigma
            )));
        }
        let drift = DriftRegistry64::with_builtins().get(&self.drift).map_err(cfg)?;
        if self.theta0.len() != drift.dim() {
            return Err(CliError::Config(format!(
                "theta0 has {} components but drift '{}' has dimension {}",
                self.theta0.len(),
                self.drift,
                drift.dim()
            )));
        }
        let domain = match &self.domain {
            Some(d) => ThetaDomain::new(d.lower.clone(), d.upper.clone()).map_err(cfg)?,
            None => drift.default_domain(),
        };
        if domain.dim() != drift.dim() {
            return Err(CliError::Config("domain dimension does not match the drift".into()));
        }
        let scheme = SamplingScheme::new(self.n, self.kappa, self.alpha, self.substeps).map_err(cfg)?;
        scheme.check_consistency_regime(hurst).map_err(cfg)?;
        if !(self.burn_in >= 0.0) || !(self.aux_dt > 0.0) || !(self.aux_burn_in >= 0.0) || self.aux_steps < 1 {
            return Err(CliError::Config(
                "burn_in and aux_burn_in must be >= 0, aux_dt > 0 and aux_steps >= 1".into(),
            ));
        }
        Ok(ResolvedModel {
            drift,
            domain,
            hurst,
            scheme,
        })
    }
}

/// Reads and deserialises a TOML file; parse errors carry line and field.
pub fn load<C: DeserializeOwned>(path: &Path) -> Result<C> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|m| CliError::Config(format!("{}: {m}", path.display())))
}

pub fn parse<C: DeserializeOwned>(text: &str) -> std::result::Result<C, String> {
    toml::from_str(text).map_err(|e| e.to_string())
}

pub fn load_model(path: &Path) -> Result<ModelConfig> {
    load(path)
}

pub fn load_study(path: &Path) -> Result<StudyConfig> {
    load(path)
}
