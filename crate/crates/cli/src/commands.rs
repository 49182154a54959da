use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use fraclse_core::contrast::{regime_constant, LimitConstants};
use fraclse_core::io::{read_path_csv, write_estimation_csv, write_path_csv};
use fraclse_core::rng::derive_seed;
use fraclse_core::{estimate_lse, info_matrix, rate_tau, PathSimulator, Regime, SamplingScheme, VarianceConvention};
use fraclse_mc::output::write_study;
use fraclse_mc::{run_study, StudyConfig};
use serde::Serialize;

use crate::config::{load_model, load_study, ModelConfig};
use crate::error::{CliError, Result};
use crate::manifest::{RunManifest, RunRecorder};

/// Stream index of the stationary run behind `Î`, shared with the study harness.
const AUX_STREAM: u64 = u64::MAX;

/// Command-line overrides applied on top of a configuration file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub convention: Option<VarianceConvention>,
}

impl Overrides {
    fn apply_model(&self, c: &mut ModelConfig) {
        if let Some(s) = self.seed {
            c.seed = Some(s);
        }
        if let Some(v) = self.convention {
            c.convention = v;
        }
    }

    fn apply_study(&self, c: &mut StudyConfig) {
        if let Some(s) = self.seed {
            c.master_seed = s;
        }
        if let Some(t) = self.threads {
            c.threads = Some(t);
        }
        if let Some(v) = self.convention {
            c.convention = v;
        }
    }
}

fn require_seed(c: &ModelConfig) -> Result<u64> {
    c.seed
        .ok_or_else(|| CliError::Config("no seed: set 'seed' in the config or pass --seed".into()))
}

fn to_string_err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

#[derive(Serialize)]
struct PathMetadata<'a> {
    drift: &'a str,
    theta0: &'a [f64],
    sigma: f64,
    hurst: f64,
    n: usize,
    h: f64,
    kappa: f64,
    alpha: f64,
    substeps: usize,
    burn_in: f64,
    x0: f64,
    seed: u64,
}

/// Simulates one path and writes `path.csv` and `path.json`.
pub fn cmd_simulate(config: &Path, output: &Path, ov: Overrides) -> Result<RunManifest> {
    let mut cfg = load_model(config)?;
    ov.apply_model(&mut cfg);
    let model = cfg.resolve()?;
    let seed = require_seed(&cfg)?;
    let sim = PathSimulator::with_burn_in(
        &*model.drift,
        &cfg.theta0,
        cfg.sigma,
        cfg.x0,
        model.scheme,
        model.hurst,
        cfg.burn_in,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let path = sim.simulate(seed).map_err(|e| CliError::Simulation(e.to_string()))?;

    let mut run = RunRecorder::start("simulate", output)?;
    run.emit("path.csv", |w| write_path_csv(&path, w).map_err(to_string_err))?;
    let meta = PathMetadata {
        drift: &cfg.drift,
        theta0: &cfg.theta0,
        sigma: cfg.sigma,
        hurst: cfg.hurst,
        n: model.scheme.n,
        h: model.scheme.h,
        kappa: cfg.kappa,
        alpha: cfg.alpha,
        substeps: cfg.substeps,
        burn_in: cfg.burn_in,
        x0: cfg.x0,
        seed,
    };
    run.emit("path.json", |w| {
        serde_json::to_writer_pretty(w, &meta).map_err(to_string_err)
    })?;
    run.finish(&cfg, Some(seed))
}

/// Estimates `θ` from an observed path CSV; writes `estimate.json` and `estimate.csv`.
pub fn cmd_estimate(config: &Path, input: &Path, output: &Path, ov: Overrides) -> Result<RunManifest> {
    let mut cfg = load_model(config)?;
    ov.apply_model(&mut cfg);
    let model = cfg.resolve()?;
    let file = File::open(input).map_err(|e| CliError::Input(format!("cannot read {}: {e}", input.display())))?;
    let path = read_path_csv(BufReader::new(file), cfg.sigma, model.hurst)
        .map_err(|e| CliError::Input(format!("{}: {e}", input.display())))?;
    let est = estimate_lse(
        &path,
        &*model.drift,
        cfg.sigma,
        model.hurst,
        &model.domain,
        &cfg.optimizer,
    )
    .map_err(|e| CliError::Estimation(e.to_string()))?;

    let mut run = RunRecorder::start("estimate", output)?;
    run.emit("estimate.json", |w| {
        serde_json::to_writer_pretty(w, &est).map_err(to_string_err)
    })?;
    run.emit("estimate.csv", |w| write_estimation_csv(&est, w).map_err(to_string_err))?;
    let mut line = Vec::new();
    write_estimation_csv(&est, &mut line).map_err(|e| CliError::Estimation(e.to_string()))?;
    std::io::stdout().write_all(&line).ok();
    run.finish(&cfg, cfg.seed)
}

/// Runs the study named in the configuration and writes its records and plot data.
pub fn cmd_study(config: &Path, output: &Path, ov: Overrides) -> Result<RunManifest> {
    let mut cfg = load_study(config)?;
    ov.apply_study(&mut cfg);
    cfg.resolve().map_err(|e| CliError::Config(e.to_string()))?;
    let mut run = RunRecorder::start("study", output)?;
    let result = run_study(&cfg).map_err(|e| CliError::from_study(e, output))?;
    let paths = write_study(&result, run.dir()).map_err(|e| CliError::from_study(e, output))?;
    run.record(paths);
    run.finish(&cfg, Some(cfg.master_seed))
}

/// Limit constants for a configuration.
#[derive(Debug, Serialize)]
pub struct ConstantsReport {
    pub hurst: f64,
    pub regime: Regime,
    pub n: usize,
    pub h: f64,
    /// `v_H` (`c_H`, or `9/16` at `H = 3/4`); absent for `H > 3/4`.
    pub v_h: Option<f64>,
    pub tau: f64,
    pub stationary_second_moment: f64,
    pub limits: LimitConstants<f64>,
}

pub fn constants(cfg: &ModelConfig) -> Result<ConstantsReport> {
    let model = cfg.resolve()?;
    let seed = require_seed(cfg)?;
    let h = model.scheme.h;
    let tau = rate_tau(cfg.n, h, model.hurst).map_err(|e| CliError::Config(e.to_string()))?;
    let v_h = match model.hurst.regime() {
        Regime::Hermite => None,
        _ => Some(regime_constant(model.hurst).map_err(|e| CliError::Config(e.to_string()))?),
    };
    let aux = SamplingScheme::with_step(cfg.aux_steps, cfg.aux_dt, 1).map_err(|e| CliError::Config(e.to_string()))?;
    let sim = PathSimulator::with_burn_in(
        &*model.drift,
        &cfg.theta0,
        cfg.sigma,
        cfg.x0,
        aux,
        model.hurst,
        cfg.aux_burn_in,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    let path = sim
        .simulate(derive_seed(seed, AUX_STREAM))
        .map_err(|e| CliError::Simulation(e.to_string()))?;
    let second_moment = path.values.iter().map(|x| x * x).sum::<f64>() / path.values.len() as f64;
    let info =
        info_matrix(&path.values, &*model.drift, &cfg.theta0).map_err(|e| CliError::Simulation(e.to_string()))?;
    let limits = LimitConstants::new(cfg.n, h, model.hurst, cfg.sigma, info, cfg.convention)
        .map_err(|e| CliError::Estimation(e.to_string()))?;
    Ok(ConstantsReport {
        hurst: cfg.hurst,
        regime: model.hurst.regime(),
        n: cfg.n,
        h,
        v_h,
        tau,
        stationary_second_moment: second_moment,
        limits,
    })
}

/// Prints `v_H`, `τ_n^H` and `Î` as JSON; also writes `constants.json` when `output` is given.
pub fn cmd_constants(config: &Path, output: Option<&Path>, ov: Overrides) -> Result<Option<RunManifest>> {
    let mut cfg = load_model(config)?;
    ov.apply_model(&mut cfg);
    let report = constants(&cfg)?;
    let text = serde_json::to_string_pretty(&report).map_err(|e| CliError::Simulation(e.to_string()))?;
    println!("{text}");
    match output {
        Some(dir) => {
            let mut run = RunRecorder::start("constants", dir)?;
            run.emit("constants.json", |w| {
                w.write_all(text.as_bytes()).map_err(to_string_err)
            })?;
            Ok(Some(run.finish(&cfg, cfg.seed)?))
        }
        None => Ok(None),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse;

    #[test]
    fn constants_report_three_quarters_log_regime() {
        let text = "theta0 = [1.0]\nsigma = 1.0\nhurst = 0.75\nkappa = 1.0\nalpha = 0.55\nn = 10000\nseed = 1\naux_steps = 20000\n";
        let cfg: ModelConfig = parse(text).unwrap();
        let r = constants(&cfg).unwrap();
        assert_eq!(r.regime, Regime::Log);
        assert_eq!(r.v_h, Some(9.0 / 16.0));
        let h = 10000f64.powf(-0.55);
        let expected = (10000.0 / 10000f64.ln()).sqrt() * h.sqrt();
        assert!((r.tau - expected).abs() < 1e-9 * expected);
        assert!(r.limits.info.matrix[0] > 0.0);
    }

    #[test]
    fn constants_need_a_seed() {
        let text = "theta0 = [1.0]\nsigma = 1.0\nhurst = 0.6\nkappa = 1.0\nalpha = 0.55\nn = 100\n";
        let cfg: ModelConfig = parse(text).unwrap();
        assert_eq!(constants(&cfg).err().unwrap().code(), 2);
    }
}
