//! Euler simulation of `X_t = X_0 + ∫ b(X_s, θ₀) ds + σ B_t` on the
//! observation grid `t_k = k h`, with internal sub-stepping.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::{CirculantFgn, HurstIndex};
use crate::model::Drift;
use crate::rng;
use crate::scalar::Real;

/// Paths with `|X|` above this are treated as numerically divergent.
pub const BLOWUP_THRESHOLD: f64 = 1e12;

/// Default number of Euler sub-steps per observation interval.
pub const DEFAULT_SUBSTEPS: usize = 8;

/// Observation grid `h = κ n^{−α}`, `t_k = k h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingScheme<T> {
    pub n: usize,
    pub kappa: T,
    pub alpha: T,
    pub h: T,
    pub substeps: usize,
}

impl<T: Real> SamplingScheme<T> {
    pub fn new(n: usize, kappa: T, alpha: T, substeps: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("sampling scheme needs n >= 1".into()));
        }
        if !(kappa > T::zero()) || !kappa.is_finite() {
            return Err(Error::Domain(format!("kappa must be positive, got {kappa}")));
        }
        if !alpha.is_finite() {
            return Err(Error::Domain(format!("alpha must be finite, got {alpha}")));
        }
        if substeps == 0 {
            return Err(Error::Domain("substeps must be at least 1".into()));
        }
        let h = kappa * T::from_count(n).powf(-alpha);
        if !(h > T::zero()) || !h.is_finite() {
            return Err(Error::Domain(format!("step h = {h} is not a positive finite number")));
        }
        Ok(SamplingScheme {
            n,
            kappa,
            alpha,
            h,
            substeps,
        })
    }

    /// Grid with a given step (recorded as `κ = h`, `α = 0`).
    pub fn with_step(n: usize, h: T, substeps: usize) -> Result<Self> {
        Self::new(n, h, T::zero(), substeps)
    }

    #[inline]
    pub fn time(&self, k: usize) -> T {
        T::from_count(k) * self.h
    }

    /// Horizon `T = n h`.
    pub fn horizon(&self) -> T {
        self.time(self.n)
    }

    /// Internal Euler step `h / substeps`.
    pub fn fine_step(&self) -> T {
        self.h / T::from_count(self.substeps)
    }

    /// Upper bound `min{1/(4(1−H)), 1}` on α from assumption A3.
    pub fn alpha_upper_bound(hurst: HurstIndex<T>) -> T {
        let bound = T::one() / (T::lit(4.0) * (T::one() - hurst.value()));
        bound.min(T::one())
    }

    /// A3: `0 < α < min{1/(4(1−H)), 1}`.
    pub fn check_consistency_regime(&self, hurst: HurstIndex<T>) -> Result<()> {
        let upper = Self::alpha_upper_bound(hurst);
        if self.alpha > T::zero() && self.alpha < upper {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "assumption A3 violated: need 0 < alpha < min{{1/(4(1-H)), 1}} = {upper} for H = {}, got alpha = {}",
                hurst.value(),
                self.alpha
            )))
        }
    }

    /// A3 plus `α > 1/2`, required for the limit distribution.
    pub fn check_normality_regime(&self, hurst: HurstIndex<T>) -> Result<()> {
        self.check_consistency_regime(hurst)?;
        if self.alpha > T::lit(0.5) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "limit theorems need 1/2 < alpha (assumption A3 range), got alpha = {}",
                self.alpha
            )))
        }
    }
}

/// A path observed at `t_0, …, t_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservedPath<T> {
    pub scheme: SamplingScheme<T>,
    pub values: Vec<T>,
    /// `B_{t_k} − B_{t_{k−1}}`, kept for diagnostics.
    pub driving_increments: Option<Vec<T>>,
    pub sigma: T,
    pub theta_true: Option<Vec<T>>,
    pub hurst: HurstIndex<T>,
}

impl<T: Real> ObservedPath<T> {
    pub fn validate(&self) -> Result<()> {
        if self.values.len() != self.scheme.n + 1 {
            return Err(Error::Domain(format!(
                "path holds {} values but the scheme needs n + 1 = {}",
                self.values.len(),
                self.scheme.n + 1
            )));
        }
        if let Some(inc) = &self.driving_increments {
            if inc.len() != self.scheme.n {
                return Err(Error::Domain(format!(
                    "path holds {} driving increments but n = {}",
                    inc.len(),
                    self.scheme.n
                )));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.scheme.n
    }

    #[inline]
    pub fn h(&self) -> T {
        self.scheme.h
    }

    pub fn times(&self) -> Vec<T> {
        (0..=self.n()).map(|k| self.scheme.time(k)).collect()
    }

    pub fn increments(&self) -> impl Iterator<Item = T> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    pub fn require_increments(&self) -> Result<&[T]> {
        self.driving_increments
            .as_deref()
            .ok_or_else(|| Error::Precondition("path carries no driving increments".into()))
    }
}

/// Simulates many paths of one configuration, reusing the noise generator.
#[derive(Clone)]
pub struct PathSimulator<'a, T: Real> {
    drift: &'a dyn Drift<T>,
    theta0: Vec<T>,
    sigma: T,
    x0: T,
    scheme: SamplingScheme<T>,
    hurst: HurstIndex<T>,
    burn_steps: usize,
    shuffle_noise: bool,
    noise: CirculantFgn<T>,
}

impl<'a, T: Real> PathSimulator<'a, T> {
    pub fn new(
        drift: &'a dyn Drift<T>,
        theta0: &[T],
        sigma: T,
        x0: T,
        scheme: SamplingScheme<T>,
        hurst: HurstIndex<T>,
    ) -> Result<Self> {
        Self::with_burn_in(drift, theta0, sigma, x0, scheme, hurst, T::zero())
    }

    /// `burn_in` is a time span simulated and discarded before `t_0`.
    pub fn with_burn_in(
        drift: &'a dyn Drift<T>,
        theta0: &[T],
        sigma: T,
        x0: T,
        scheme: SamplingScheme<T>,
        hurst: HurstIndex<T>,
        burn_in: T,
    ) -> Result<Self> {
        if theta0.len() != drift.dim() {
            return Err(Error::Domain(format!(
                "theta0 has length {} but drift '{}' has dimension {}",
                theta0.len(),
                drift.name(),
                drift.dim()
            )));
        }
        if !(burn_in >= T::zero()) {
            return Err(Error::Domain(format!("burn-in must be non-negative, got {burn_in}")));
        }
        let scheme = SamplingScheme::new(scheme.n, scheme.kappa, scheme.alpha, scheme.substeps)?;
        let burn_steps = (burn_in / scheme.fine_step()).ceil().to_usize().unwrap_or(0);
        let noise = CirculantFgn::new(burn_steps + scheme.n * scheme.substeps, hurst)?;
        Ok(PathSimulator {
            drift,
            theta0: theta0.to_vec(),
            sigma,
            x0,
            scheme,
            hurst,
            burn_steps,
            shuffle_noise: false,
            noise,
        })
    }

    /// Randomly permutes the fine noise before integrating. Destroys the fGn
    /// dependence while keeping the marginal law; used as a negative control.
    pub fn shuffle_noise(mut self, on: bool) -> Self {
        self.shuffle_noise = on;
        self
    }

    pub fn scheme(&self) -> &SamplingScheme<T> {
        &self.scheme
    }

    pub fn burn_steps(&self) -> usize {
        self.burn_steps
    }

    /// Fine-grid fGn increments (spacing `h/substeps`) for `seed`, burn-in included.
    pub fn fine_noise(&self, seed: u64) -> Vec<T> {
        let mut rng = rng::stream(seed);
        let mut noise = vec![T::zero(); self.noise.len()];
        self.noise.sample_into(&mut rng, &mut noise);
        if self.shuffle_noise {
            noise.shuffle(&mut rng);
        }
        let scale = self.scheme.fine_step().powf(self.hurst.value());
        noise.iter_mut().for_each(|v| *v = *v * scale);
        noise
    }

    pub fn simulate(&self, seed: u64) -> Result<ObservedPath<T>> {
        let noise = self.fine_noise(seed);
        euler_from_noise(
            self.drift,
            &self.theta0,
            self.sigma,
            self.x0,
            &self.scheme,
            self.hurst,
            &noise,
            self.burn_steps,
        )
    }
}

/// Simulates one path from `seed` without burn-in.
pub fn simulate_path<T: Real>(
    drift: &dyn Drift<T>,
    theta0: &[T],
    sigma: T,
    x0: T,
    scheme: &SamplingScheme<T>,
    hurst: HurstIndex<T>,
    seed: u64,
) -> Result<ObservedPath<T>> {
    PathSimulator::new(drift, theta0, sigma, x0, *scheme, hurst)?.simulate(seed)
}

/// Euler recursion `X ← X + δ b(X, θ₀) + σ ΔB` driven by given fine increments.
///
/// `fine_increments` holds `burn_steps + n·substeps` fBm increments on the
/// grid of spacing `δ = h / substeps`; the first `burn_steps` are discarded.
#[allow(clippy::too_many_arguments)]
pub fn euler_from_noise<T: Real>(
    drift: &dyn Drift<T>,
    theta0: &[T],
    sigma: T,
    x0: T,
    scheme: &SamplingScheme<T>,
    hurst: HurstIndex<T>,
    fine_increments: &[T],
    burn_steps: usize,
) -> Result<ObservedPath<T>> {
    let sub = scheme.substeps;
    let n = scheme.n;
    let expected = burn_steps + n * sub;
    if fine_increments.len() != expected {
        return Err(Error::Domain(format!(
            "expected {expected} fine increments, got {}",
            fine_increments.len()
        )));
    }
    if theta0.len() != drift.dim() {
        return Err(Error::Domain(format!(
            "theta0 has length {} but drift has dimension {}",
            theta0.len(),
            drift.dim()
        )));
    }
    let delta = scheme.fine_step();
    let limit = T::lit(BLOWUP_THRESHOLD);
    let mut x = x0;
    let mut step = 0usize;
    let advance = |x: &mut T, db: T, step: &mut usize| -> Result<()> {
        *x = *x + delta * drift.b(*x, theta0) + sigma * db;
        if !(x.abs() <= limit) {
            return Err(Error::SimulationBlowup {
                step: *step,
                value: x.as_f64().abs(),
            });
        }
        *step += 1;
        Ok(())
    };
    for &db in &fine_increments[..burn_steps] {
        advance(&mut x, db, &mut step)?;
    }
    let mut values = Vec::with_capacity(n + 1);
    let mut driving = Vec::with_capacity(n);
    values.push(x);
    for chunk in fine_increments[burn_steps..].chunks_exact(sub) {
        let mut agg = T::zero();
        for &db in chunk {
            advance(&mut x, db, &mut step)?;
            agg = agg + db;
        }
        values.push(x);
        driving.push(agg);
    }
    Ok(ObservedPath {
        scheme: *scheme,
        values,
        driving_increments: Some(driving),
        sigma,
        theta_true: Some(theta0.to_vec()),
        hurst,
    })
}

/// Sums consecutive groups of `factor` increments.
pub fn aggregate_increments<T: Real>(fine: &[T], factor: usize) -> Vec<T> {
    fine.chunks_exact(factor.max(1))
        .map(|c| c.iter().copied().sum())
        .collect()
}

/// Empirical moment diagnostics across independent paths.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MomentReport {
    pub p: u32,
    pub paths: usize,
    /// `max_k` of the empirical `E|X_{t_k}|^p`.
    pub max_moment: f64,
    pub argmax_time: f64,
    /// `(|t − s|, E|X_t − X_s|^p)` on dyadic gaps.
    pub gap_moments: Vec<(f64, f64)>,
    /// Log-log slope of the gap moments, to compare with `pH`.
    pub exponent: f64,
    pub exponent_se: f64,
    /// `max_g E|X_t − X_s|^p / |t − s|^{pH}`.
    pub increment_constant: f64,
    /// t-statistic of the slope of `E|X_t|^p` over the last half of the horizon.
    pub trend_t_stat: f64,
}

/// Ordinary least squares `y = a + b x`; returns `(b, se(b))`.
pub(crate) fn ols_slope(x: &[f64], y: &[f64]) -> (f64, f64) {
    let m = x.len() as f64;
    let mx = x.iter().sum::<f64>() / m;
    let my = y.iter().sum::<f64>() / m;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let se = if x.len() > 2 {
        (rss / (m - 2.0) / sxx).sqrt()
    } else {
        f64::NAN
    };
    (slope, se)
}

/// Number of blocks used by the trend statistic.
const TREND_BLOCKS: usize = 10;

/// Moment bounds `E|X_t|^p ≤ c_p` and `E|X_t − X_s|^p ≤ k_p |t − s|^{pH}`,
/// checked empirically over at least 100 paths sharing one configuration.
///
/// The trend statistic regresses block means (10 blocks over the last half
/// of the horizon) on block centres, which keeps serial correlation of the
/// moment curve from inflating it.
pub fn check_moment_bounds<T: Real>(paths: &[ObservedPath<T>], p: u32) -> Result<MomentReport> {
    if paths.len() < 100 {
        return Err(Error::Precondition(format!(
            "moment check needs at least 100 paths, got {}",
            paths.len()
        )));
    }
    if p == 0 || !p.is_multiple_of(2) {
        return Err(Error::Precondition(format!(
            "moment order must be even and positive, got {p}"
        )));
    }
    let first = &paths[0];
    let n = first.n();
    let h = first.h().as_f64();
    if paths.iter().any(|q| q.n() != n || q.h() != first.h()) {
        return Err(Error::Precondition("paths must share one sampling scheme".into()));
    }
    if n < 4 {
        return Err(Error::Precondition("moment check needs n >= 4".into()));
    }
    let pi = p as i32;
    let count = paths.len() as f64;
    let moments: Vec<f64> = (0..=n)
        .map(|k| paths.iter().map(|q| q.values[k].as_f64().powi(pi)).sum::<f64>() / count)
        .collect();
    let (kmax, &max_moment) = moments
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");

    let mut gap_moments = Vec::new();
    let mut g = 1usize;
    while g <= n / 2 {
        let mut acc = 0.0;
        let mut cnt = 0usize;
        for q in paths {
            for s in 0..=(n - g) {
                acc += (q.values[s + g] - q.values[s]).as_f64().powi(pi);
                cnt += 1;
            }
        }
        gap_moments.push((g as f64 * h, acc / cnt as f64));
        g *= 2;
    }
    let lx: Vec<f64> = gap_moments.iter().map(|(t, _)| t.ln()).collect();
    let ly: Vec<f64> = gap_moments.iter().map(|(_, m)| m.ln()).collect();
    let (exponent, exponent_se) = if lx.len() >= 2 {
        ols_slope(&lx, &ly)
    } else {
        (f64::NAN, f64::NAN)
    };
    let ph = p as f64 * first.hurst.value().as_f64();
    let increment_constant = gap_moments.iter().map(|(t, m)| m / t.powf(ph)).fold(0.0, f64::max);

    let tail = &moments[n / 2..];
    let blocks = TREND_BLOCKS.min(tail.len());
    let size = tail.len() / blocks;
    let (mut bx, mut by) = (Vec::new(), Vec::new());
    for b in 0..blocks {
        let seg = &tail[b * size..(b + 1) * size];
        bx.push((n / 2 + b * size) as f64 + size as f64 / 2.0);
        by.push(seg.iter().sum::<f64>() / seg.len() as f64);
    }
    let (slope, se) = ols_slope(&bx, &by);
    let trend_t_stat = if se > 0.0 { slope / se } else { 0.0 };

    Ok(MomentReport {
        p,
        paths: paths.len(),
        max_moment,
        argmax_time: kmax as f64 * h,
        gap_moments,
        exponent,
        exponent_se,
        increment_constant,
        trend_t_stat,
    })
}

/// Discrete λ-Hölder seminorm `sup_{s≠t} |X_t − X_s| / |t − s|^λ` over all grid pairs.
pub fn holder_norm<T: Real>(path: &ObservedPath<T>, lambda: T) -> Result<T> {
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(Error::Domain(format!(
            "Hölder exponent must lie in (0, 1), got {lambda}"
        )));
    }
    let v = &path.values;
    if v.len() < 2 {
        return Err(Error::Precondition("Hölder norm needs at least two points".into()));
    }
    let h = path.h();
    let mut best = T::zero();
    for gap in 1..v.len() {
        let denom = (T::from_count(gap) * h).powf(lambda);
        let widest = v
            .windows(gap + 1)
            .map(|w| (w[gap] - w[0]).abs())
            .fold(T::zero(), T::max);
        best = best.max(widest / denom);
    }
    Ok(best)
}
