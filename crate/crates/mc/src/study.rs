//! Replicated studies. Every replicate draws its randomness from
//! `replicate_seed(master, n, r)` alone, runs on the worker pool, and is
//! merged back by `(n, r)` so the result does not depend on the worker count.

use fraclse_core::contrast::{gaussian_covariance, regime_constant};
use fraclse_core::limits::{ergodic_average, hermite_stat_with, weighted_increment_sum};
use fraclse_core::rng::derive_seed;
use fraclse_core::{
    asym_cov, estimate_lse, info_matrix, lemma3_decomposition, rate_tau, AsymptoticLaw, CirculantFgn, FgnSample,
    InfoEstimate64, ObservedPath64, PathSimulator, Regime, SamplingScheme, VarianceConvention,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ResolvedStudy, StudyConfig, StudyKind};
use crate::error::{McError, Result};
use crate::stats::{self, KsResult};

/// Failure share above which a study is aborted.
pub const MAX_FAILURE_RATE: f64 = 0.02;

/// Stream index reserved for the auxiliary stationary run.
const AUX_STREAM: u64 = u64::MAX;

/// Seed of replicate `r` at sample size `n`.
pub fn replicate_seed(master: u64, n: usize, r: usize) -> u64 {
    derive_seed(derive_seed(master, n as u64), r as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicateRecord {
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub theta_hat: Vec<f64>,
    /// `τ_n^H (θ_n − θ₀)`.
    pub zeta: Vec<f64>,
    pub abs_qn: Option<f64>,
    pub boundary: bool,
    /// Remainder of the `τ Q_n(θ_n)` decomposition.
    pub remainder: Option<f64>,
    /// Normalised quadratic variation of the driving noise.
    pub statistic: Option<f64>,
    /// `(1/(n h)) Σ ∇θb(X, θ₀) ΔB`, one entry per component.
    pub weighted_sum: Vec<f64>,
    /// `(1/n) Σ b(X, θ₀) ∇θb(X, θ₀)`, the ergodic estimate of `E[b ∇θb]`.
    pub drift_moment: Vec<f64>,
    /// `(1/n) Σ X²`.
    pub second_moment: Option<f64>,
}

impl ReplicateRecord {
    fn empty(n: usize, replicate: usize, seed: u64) -> Self {
        ReplicateRecord {
            n,
            replicate,
            seed,
            theta_hat: vec![],
            zeta: vec![],
            abs_qn: None,
            boundary: false,
            remainder: None,
            statistic: None,
            weighted_sum: vec![],
            drift_moment: vec![],
            second_moment: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub n: usize,
    pub replicate: usize,
    pub seed: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerNSummary {
    pub n: usize,
    pub h: f64,
    pub tau: f64,
    pub completed: usize,
    pub failed: usize,
    pub median_abs_error: Vec<f64>,
    pub mean_zeta: Vec<f64>,
    /// Row-major covariance of `ζ`.
    pub zeta_covariance: Vec<f64>,
    pub median_abs_remainder: Option<f64>,
    pub statistic_variance: Option<f64>,
    pub mean_weighted_sum: Vec<f64>,
    pub mean_drift_moment: Vec<f64>,
    pub mean_second_moment: Option<f64>,
}

/// Which reading of the information matrix a target uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InfoReading {
    /// `E[g gᵀ]`, `g = ∇θb · b`.
    SecondMoment,
    /// `E[g] E[g]ᵀ`.
    OuterOfMean,
}

impl InfoReading {
    pub fn as_str(self) -> &'static str {
        match self {
            InfoReading::SecondMoment => "second-moment",
            InfoReading::OuterOfMean => "outer-of-mean",
        }
    }
}

/// KS test of one component of `ζ` (or of a plain statistic) against a centred normal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormalityTest {
    pub n: usize,
    pub convention: VarianceConvention,
    pub info_reading: Option<InfoReading>,
    pub component: usize,
    pub target_variance: f64,
    pub empirical_variance: f64,
    pub variance_ratio: f64,
    pub ks: KsResult,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceRatio {
    pub n_small: usize,
    pub n_large: usize,
    pub component: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteDiagnostics {
    pub n: usize,
    pub component: usize,
    /// Limit coefficient `σ I⁻¹ E[∇θb · b] / 2` (empty for pure fGn).
    pub coefficient: Vec<f64>,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    /// Correlation of `ζ` with the replicate's own noise variation.
    pub correlation_with_noise: Option<f64>,
    /// Least-squares slope of `ζ` on that variation.
    pub slope_on_noise: Option<f64>,
    /// Whether the slope has the sign of the coefficient.
    pub sign_agrees: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuxiliaryRun {
    pub steps: usize,
    pub dt: f64,
    pub second_moment: f64,
    pub info: InfoEstimate64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyResult {
    pub kind: StudyKind,
    pub config: StudyConfig,
    pub records: Vec<ReplicateRecord>,
    pub failures: Vec<FailureRecord>,
    pub per_n: Vec<PerNSummary>,
    /// Consistency: medians strictly decrease in `n` for every component.
    pub monotone_decreasing: Option<bool>,
    pub auxiliary: Option<AuxiliaryRun>,
    pub normality: Vec<NormalityTest>,
    pub variance_ratios: Vec<VarianceRatio>,
    pub hermite: Vec<HermiteDiagnostics>,
}

impl StudyResult {
    pub fn records_for(&self, n: usize) -> impl Iterator<Item = &ReplicateRecord> {
        self.records.iter().filter(move |r| r.n == n)
    }

    pub fn summary(&self, n: usize) -> Option<&PerNSummary> {
        self.per_n.iter().find(|s| s.n == n)
    }

    /// Failure share over all attempted replicates.
    pub fn failure_rate(&self) -> f64 {
        let attempted = self.records.len() + self.failures.len();
        self.failures.len() as f64 / attempted.max(1) as f64
    }

    /// Tests passing at level `alpha` under the given convention and reading.
    pub fn normality_passes(&self, convention: VarianceConvention, reading: Option<InfoReading>, alpha: f64) -> bool {
        let tests: Vec<_> = self
            .normality
            .iter()
            .filter(|t| t.convention == convention && t.info_reading == reading)
            .collect();
        !tests.is_empty() && tests.iter().all(|t| t.ks.p_value > alpha)
    }
}

/// Runs the study named in the configuration.
pub fn run_study(config: &StudyConfig) -> Result<StudyResult> {
    match config.study {
        StudyKind::Consistency => run_consistency_study(config),
        StudyKind::Normality => run_normality_study(config),
        StudyKind::Hermite => run_hermite_regime_study(config),
        StudyKind::HermiteFgn => run_hermite_fgn_study(config),
        StudyKind::Ergodic => run_ergodic_study(config),
    }
}

fn pool(threads: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        b = b.num_threads(t);
    }
    b.build().map_err(|e| McError::ThreadPool(e.to_string()))
}

type Outcome = std::result::Result<ReplicateRecord, FailureRecord>;

/// Executes `task(r)` for `r = 0..replicates` in parallel, returning outcomes in index order.
fn replicate_map<F>(pool: &rayon::ThreadPool, replicates: usize, task: F) -> Vec<Outcome>
where
    F: Fn(usize) -> Outcome + Sync,
{
    pool.install(|| (0..replicates).into_par_iter().map(&task).collect())
}

fn split(outcomes: Vec<Outcome>, records: &mut Vec<ReplicateRecord>, failures: &mut Vec<FailureRecord>) {
    for o in outcomes {
        match o {
            Ok(r) => records.push(r),
            Err(f) => failures.push(f),
        }
    }
}

fn enforce_failure_policy(records: usize, failures: &[FailureRecord]) -> Result<()> {
    let attempted = records + failures.len();
    if failures.len() as f64 > MAX_FAILURE_RATE * attempted as f64 {
        return Err(McError::FailureRate {
            failed: failures.len(),
            attempted,
            first: failures.first().map(|f| f.message.clone()).unwrap_or_default(),
        });
    }
    Ok(())
}

/// Shared path-based replicate: simulate, estimate, decompose.
struct PathTask<'a> {
    study: &'a ResolvedStudy,
    sim: PathSimulator<'a, f64>,
    scheme: SamplingScheme<f64>,
    tau: f64,
    estimate: bool,
    ergodic: bool,
}

impl<'a> PathTask<'a> {
    fn new(study: &'a ResolvedStudy, n: usize, estimate: bool, ergodic: bool) -> Result<Self> {
        let c = &study.config;
        let scheme = c.scheme(n)?;
        let sim = PathSimulator::with_burn_in(&*study.drift, &c.theta0, c.sigma, c.x0, scheme, study.hurst, c.burn_in)?
            .shuffle_noise(c.shuffle_noise);
        let tau = rate_tau(n, scheme.h, study.hurst)?;
        Ok(PathTask {
            study,
            sim,
            scheme,
            tau,
            estimate,
            ergodic,
        })
    }

    fn record(&self, path: &ObservedPath64, n: usize, r: usize, seed: u64) -> fraclse_core::Result<ReplicateRecord> {
        let c = &self.study.config;
        let drift = &*self.study.drift;
        let mut rec = ReplicateRecord::empty(n, r, seed);
        let db = path.require_increments()?;
        let fgn = FgnSample::new(db.to_vec(), self.scheme.h, self.study.hurst, seed)?;
        rec.statistic = Some(hermite_stat_with(&fgn, c.convention)?.statistic);
        if self.estimate {
            let est = estimate_lse(path, drift, c.sigma, self.study.hurst, &self.study.domain, &c.optimizer)?;
            rec.zeta = est
                .theta_hat
                .iter()
                .zip(&c.theta0)
                .map(|(t, t0)| self.tau * (t - t0))
                .collect();
            rec.abs_qn = Some(est.abs_qn_at_opt);
            rec.boundary = est.boundary;
            rec.remainder =
                Some(lemma3_decomposition(path, drift, &est.theta_hat, c.sigma, self.study.hurst)?.remainder);
            rec.theta_hat = est.theta_hat;
        }
        if self.ergodic {
            let d = drift.dim();
            let theta0 = &c.theta0;
            for i in 0..d {
                let grad_i = |x: f64, th: &[f64]| drift.grad_theta_b_vec(x, th)[i];
                rec.weighted_sum.push(weighted_increment_sum(path, grad_i, theta0)?);
                rec.drift_moment.push(ergodic_average(
                    path,
                    |x, th| drift.b(x, th) * drift.grad_theta_b_vec(x, th)[i],
                    theta0,
                ));
            }
            rec.second_moment = Some(ergodic_average(path, |x, _| x * x, theta0));
        }
        Ok(rec)
    }

    fn run(&self, n: usize, r: usize) -> Outcome {
        let seed = replicate_seed(self.study.config.master_seed, n, r);
        let fail = |e: fraclse_core::Error| FailureRecord {
            n,
            replicate: r,
            seed,
            message: e.to_string(),
        };
        let path = self.sim.simulate(seed).map_err(fail)?;
        self.record(&path, n, r, seed).map_err(fail)
    }
}

fn collect_paths(
    study: &ResolvedStudy,
    estimate: bool,
    ergodic: bool,
) -> Result<(Vec<ReplicateRecord>, Vec<FailureRecord>)> {
    let c = &study.config;
    let pool = pool(c.threads)?;
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for &n in &c.n_list {
        let task = PathTask::new(study, n, estimate, ergodic)?;
        eprintln!("[{}] n = {n}: {} replicates", c.study.as_str(), c.replicates);
        let outcomes = replicate_map(&pool, c.replicates, |r| task.run(n, r));
        split(outcomes, &mut records, &mut failures);
    }
    enforce_failure_policy(records.len(), &failures)?;
    Ok((records, failures))
}

fn column(records: &[&ReplicateRecord], f: impl Fn(&ReplicateRecord) -> Option<f64>) -> Vec<f64> {
    records.iter().filter_map(|r| f(r)).collect()
}

fn mean_vec(rows: &[Vec<f64>]) -> Vec<f64> {
    let d = rows.first().map_or(0, |r| r.len());
    (0..d)
        .map(|i| stats::mean(&rows.iter().map(|r| r[i]).collect::<Vec<_>>()))
        .collect()
}

fn summarise(
    study: &ResolvedStudy,
    records: &[ReplicateRecord],
    failures: &[FailureRecord],
) -> Result<Vec<PerNSummary>> {
    let c = &study.config;
    let mut out = Vec::new();
    for &n in &c.n_list {
        let scheme = c.scheme(n)?;
        let rs: Vec<&ReplicateRecord> = records.iter().filter(|r| r.n == n).collect();
        let zetas: Vec<Vec<f64>> = rs
            .iter()
            .filter(|r| !r.zeta.is_empty())
            .map(|r| r.zeta.clone())
            .collect();
        let d = zetas.first().map_or(0, |z| z.len());
        let median_abs_error = (0..d)
            .map(|i| {
                let errs: Vec<f64> = rs.iter().map(|r| (r.theta_hat[i] - c.theta0[i]).abs()).collect();
                stats::median(&errs)
            })
            .collect();
        let remainders = column(&rs, |r| r.remainder.map(f64::abs));
        let statistics = column(&rs, |r| r.statistic);
        let weighted: Vec<Vec<f64>> = rs
            .iter()
            .filter(|r| !r.weighted_sum.is_empty())
            .map(|r| r.weighted_sum.clone())
            .collect();
        let moments: Vec<Vec<f64>> = rs
            .iter()
            .filter(|r| !r.drift_moment.is_empty())
            .map(|r| r.drift_moment.clone())
            .collect();
        let m2 = column(&rs, |r| r.second_moment);
        out.push(PerNSummary {
            n,
            h: scheme.h,
            tau: rate_tau(n, scheme.h, study.hurst)?,
            completed: rs.len(),
            failed: failures.iter().filter(|f| f.n == n).count(),
            median_abs_error,
            mean_zeta: mean_vec(&zetas),
            zeta_covariance: if zetas.len() > 1 {
                stats::covariance_matrix(&zetas)
            } else {
                vec![]
            },
            median_abs_remainder: (!remainders.is_empty()).then(|| stats::median(&remainders)),
            statistic_variance: (statistics.len() > 1).then(|| stats::variance(&statistics)),
            mean_weighted_sum: mean_vec(&weighted),
            mean_drift_moment: mean_vec(&moments),
            mean_second_moment: (!m2.is_empty()).then(|| stats::mean(&m2)),
        });
    }
    Ok(out)
}

fn empty_result(study: &ResolvedStudy) -> StudyResult {
    StudyResult {
        kind: study.config.study,
        config: study.config.clone(),
        records: vec![],
        failures: vec![],
        per_n: vec![],
        monotone_decreasing: None,
        auxiliary: None,
        normality: vec![],
        variance_ratios: vec![],
        hermite: vec![],
    }
}

/// Median `|θ_n − θ₀|` across the `n` grid.
pub fn run_consistency_study(config: &StudyConfig) -> Result<StudyResult> {
    let mut study = config.resolve()?;
    study.config.study = StudyKind::Consistency;
    let (records, failures) = collect_paths(&study, true, false)?;
    let per_n = summarise(&study, &records, &failures)?;
    let d = study.drift.dim();
    let monotone = (0..d).all(|i| {
        per_n
            .windows(2)
            .all(|w| w[1].median_abs_error[i] < w[0].median_abs_error[i])
    });
    let mut result = empty_result(&study);
    result.records = records;
    result.failures = failures;
    result.per_n = per_n;
    result.monotone_decreasing = Some(monotone);
    Ok(result)
}

/// Long stationary run giving `Î(θ₀)` and `E X̄²`.
pub fn auxiliary_run(study: &ResolvedStudy) -> Result<AuxiliaryRun> {
    let c = &study.config;
    let scheme = SamplingScheme::with_step(c.aux_steps, c.aux_dt, 1)?;
    let sim = PathSimulator::with_burn_in(
        &*study.drift,
        &c.theta0,
        c.sigma,
        c.x0,
        scheme,
        study.hurst,
        c.aux_burn_in,
    )?;
    let path = sim.simulate(derive_seed(c.master_seed, AUX_STREAM))?;
    let info = info_matrix(&path.values, &*study.drift, &c.theta0)?;
    let second_moment = path.values.iter().map(|x| x * x).sum::<f64>() / path.values.len() as f64;
    Ok(AuxiliaryRun {
        steps: c.aux_steps,
        dt: c.aux_dt,
        second_moment,
        info,
    })
}

fn zeta_component(result: &StudyResult, n: usize, i: usize) -> Vec<f64> {
    result.records_for(n).map(|r| r.zeta[i]).collect()
}

/// `ζ` against `N(0, σ² v/4 · I⁻¹)` (or `σ² v²/4 · I⁻¹`) for both conventions and both readings of `I`.
pub fn run_normality_study(config: &StudyConfig) -> Result<StudyResult> {
    let mut study = config.resolve()?;
    study.config.study = StudyKind::Normality;
    let aux = auxiliary_run(&study)?;
    let (records, failures) = collect_paths(&study, true, false)?;
    let per_n = summarise(&study, &records, &failures)?;
    let mut result = empty_result(&study);
    result.records = records;
    result.failures = failures;
    result.per_n = per_n;

    let c = &study.config;
    let d = study.drift.dim();
    let v = regime_constant(study.hurst)?;
    let readings = [
        (InfoReading::SecondMoment, aux.info.clone()),
        (InfoReading::OuterOfMean, aux.info.outer_of_mean()),
    ];
    for &n in &c.n_list {
        for convention in VarianceConvention::ALL {
            for (reading, info) in &readings {
                let cov = match gaussian_covariance(c.sigma, v, &info.matrix, d, convention) {
                    Ok(cov) => cov,
                    Err(_) => continue,
                };
                for i in 0..d {
                    let z = zeta_component(&result, n, i);
                    let target = cov[i * d + i];
                    if z.len() < stats::KS_MIN_SAMPLE || !(target > 0.0) {
                        continue;
                    }
                    let emp = stats::variance(&z);
                    result.normality.push(NormalityTest {
                        n,
                        convention,
                        info_reading: Some(*reading),
                        component: i,
                        target_variance: target,
                        empirical_variance: emp,
                        variance_ratio: emp / target,
                        ks: stats::ks_test(&z, 0.0, target)?,
                    });
                }
            }
        }
    }
    result.auxiliary = Some(aux);
    Ok(result)
}

fn variance_ratios(ns: &[usize], d: usize, values: impl Fn(usize, usize) -> Vec<f64>) -> Vec<VarianceRatio> {
    let mut out = Vec::new();
    for w in ns.windows(2) {
        for i in 0..d {
            let (a, b) = (values(w[0], i), values(w[1], i));
            if a.len() > 1 && b.len() > 1 {
                out.push(VarianceRatio {
                    n_small: w[0],
                    n_large: w[1],
                    component: i,
                    ratio: stats::variance(&b) / stats::variance(&a),
                });
            }
        }
    }
    out
}

/// `ζ` for `H > 3/4`: variance stabilisation across `n`, shape, and the sign of
/// its dependence on the driving noise's quadratic variation.
pub fn run_hermite_regime_study(config: &StudyConfig) -> Result<StudyResult> {
    let mut study = config.resolve()?;
    study.config.study = StudyKind::Hermite;
    let aux = auxiliary_run(&study)?;
    let (records, failures) = collect_paths(&study, true, false)?;
    let per_n = summarise(&study, &records, &failures)?;
    let mut result = empty_result(&study);
    result.records = records;
    result.failures = failures;
    result.per_n = per_n;

    let c = &study.config;
    let d = study.drift.dim();
    let coefficient = match asym_cov(study.hurst, c.sigma, &aux.info, c.convention) {
        Ok(AsymptoticLaw::Hermite { coefficient }) => coefficient,
        _ => vec![f64::NAN; d],
    };
    result.variance_ratios = variance_ratios(&c.n_list, d, |n, i| zeta_component(&result, n, i));
    for &n in &c.n_list {
        let stat: Vec<f64> = result.records_for(n).map(|r| r.statistic.unwrap_or(f64::NAN)).collect();
        for i in 0..d {
            let z = zeta_component(&result, n, i);
            if z.len() < 3 {
                continue;
            }
            let corr = stats::correlation(&z, &stat);
            let slope = corr * (stats::variance(&z) / stats::variance(&stat)).sqrt();
            result.hermite.push(HermiteDiagnostics {
                n,
                component: i,
                coefficient: coefficient.clone(),
                skewness: stats::skewness(&z),
                excess_kurtosis: stats::excess_kurtosis(&z),
                correlation_with_noise: Some(corr),
                slope_on_noise: Some(slope),
                sign_agrees: Some(slope.signum() == coefficient[i].signum()),
            });
        }
    }
    result.auxiliary = Some(aux);
    Ok(result)
}

/// Normalised quadratic variation of pure fGn. Each replicate draws one
/// unit-spacing sample of length `max(n_list)`; the statistic at every `n`
/// uses its first `n` increments, so the values across `n` are nested.
pub fn run_hermite_fgn_study(config: &StudyConfig) -> Result<StudyResult> {
    let mut study = config.resolve()?;
    study.config.study = StudyKind::HermiteFgn;
    let c = &study.config;
    let mut ns = c.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let max_n = *ns.last().unwrap();
    let gen = CirculantFgn::new(max_n, study.hurst)?;
    let pool = pool(c.threads)?;
    eprintln!("[hermite-fgn] n <= {max_n}: {} replicates", c.replicates);
    let outcomes: Vec<std::result::Result<Vec<ReplicateRecord>, FailureRecord>> = pool.install(|| {
        (0..c.replicates)
            .into_par_iter()
            .map(|r| {
                let seed = derive_seed(c.master_seed, r as u64);
                let fail = |e: fraclse_core::Error| FailureRecord {
                    n: max_n,
                    replicate: r,
                    seed,
                    message: e.to_string(),
                };
                let full = gen.sample(1.0, seed).map_err(fail)?;
                ns.iter()
                    .map(|&n| {
                        let prefix =
                            FgnSample::new(full.increments[..n].to_vec(), 1.0, study.hurst, seed).map_err(fail)?;
                        let mut rec = ReplicateRecord::empty(n, r, seed);
                        rec.statistic = Some(hermite_stat_with(&prefix, c.convention).map_err(fail)?.statistic);
                        Ok(rec)
                    })
                    .collect()
            })
            .collect()
    });
    let mut by_replicate = Vec::new();
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(v) => by_replicate.push(v),
            Err(f) => failures.push(f),
        }
    }
    // order by (n, replicate)
    let mut records: Vec<ReplicateRecord> = by_replicate.into_iter().flatten().collect();
    records.sort_by_key(|r| (ns.iter().position(|&n| n == r.n).unwrap(), r.replicate));
    enforce_failure_policy(records.len(), &failures)?;

    let mut result = empty_result(&study);
    result.per_n = summarise(&study, &records, &failures)?;
    result.records = records;
    result.failures = failures;
    let stat_at = |n: usize| -> Vec<f64> { result.records_for(n).filter_map(|r| r.statistic).collect() };
    let ratios = variance_ratios(&ns, 1, |n, _| stat_at(n));
    let mut normality = Vec::new();
    let mut hermite = Vec::new();
    for &n in &ns {
        let s = stat_at(n);
        if study.hurst.regime() != Regime::Hermite && s.len() >= stats::KS_MIN_SAMPLE {
            let emp = stats::variance(&s);
            normality.push(NormalityTest {
                n,
                convention: c.convention,
                info_reading: None,
                component: 0,
                target_variance: 1.0,
                empirical_variance: emp,
                variance_ratio: emp,
                ks: stats::ks_test(&s, 0.0, 1.0)?,
            });
        }
        if s.len() >= 3 {
            hermite.push(HermiteDiagnostics {
                n,
                component: 0,
                coefficient: vec![],
                skewness: stats::skewness(&s),
                excess_kurtosis: stats::excess_kurtosis(&s),
                correlation_with_noise: None,
                slope_on_noise: None,
                sign_agrees: None,
            });
        }
    }
    result.variance_ratios = ratios;
    result.normality = normality;
    result.hermite = hermite;
    Ok(result)
}

/// Weighted increment sums `(1/(n h)) Σ ∇θb ΔB` next to ergodic averages of `b ∇θb`.
pub fn run_ergodic_study(config: &StudyConfig) -> Result<StudyResult> {
    let mut study = config.resolve()?;
    study.config.study = StudyKind::Ergodic;
    let (records, failures) = collect_paths(&study, false, true)?;
    let mut result = empty_result(&study);
    result.per_n = summarise(&study, &records, &failures)?;
    result.records = records;
    result.failures = failures;
    Ok(result)
}
