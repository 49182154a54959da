//! Exact fractional Gaussian noise and fractional Brownian motion.
//!
//! Two samplers share one contract: [`CholeskyFgn`] factors the Toeplitz
//! covariance directly (O(n^2) memory, used as an oracle), and [`CirculantFgn`]
//! embeds it in a circulant matrix diagonalised by the FFT (Davies–Harte).

use std::sync::Arc;

use rand::Rng;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, fill_standard_normal};
use crate::scalar::{abs_pow, Real};

/// Default cap on `n` for the Cholesky sampler.
pub const DEFAULT_CHOLESKY_CAP: usize = 1 << 13;

/// Relative tolerance for negative circulant eigenvalues.
pub const EIGENVALUE_TOLERANCE: f64 = 1e-10;

/// Hurst index `H` of the driving fractional Brownian motion, `0 < H < 1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct HurstIndex<T>(T);

/// Limit regime of the normalised 2-Hermite variation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `H < 3/4`: Gaussian limit at rate `sqrt(n)`.
    Gaussian,
    /// `H = 3/4`: Gaussian limit at rate `sqrt(n log n)`.
    Log,
    /// `H > 3/4`: non-Gaussian (Hermite/Rosenblatt) limit at rate `n^(2H-1)`.
    Hermite,
}

impl<T: Real> HurstIndex<T> {
    pub fn new(value: T) -> Result<Self> {
        if value > T::zero() && value < T::one() && value.is_finite() {
            Ok(HurstIndex(value))
        } else {
            Err(Error::Domain(format!("Hurst index must lie in (0, 1), got {value}")))
        }
    }

    #[inline]
    pub fn value(self) -> T {
        self.0
    }

    /// Rejects `H <= 1/2`; the estimation theory only covers `1/2 < H < 1`.
    pub fn require_estimation_range(self) -> Result<Self> {
        if self.0 > T::lit(0.5) {
            Ok(self)
        } else {
            Err(Error::Domain(format!(
                "estimation requires 1/2 < H < 1, got H = {}",
                self.0
            )))
        }
    }

    /// True when `H` is 3/4 up to a few ulps.
    pub fn is_three_quarters(self) -> bool {
        (self.0 - T::lit(0.75)).abs() <= T::epsilon() * T::lit(4.0)
    }

    pub fn regime(self) -> Regime {
        if self.is_three_quarters() {
            Regime::Log
        } else if self.0 < T::lit(0.75) {
            Regime::Gaussian
        } else {
            Regime::Hermite
        }
    }
}

/// Covariance of fBm: `½(s^{2H} + t^{2H} − |t−s|^{2H})`.
pub fn fbm_covariance<T: Real>(s: T, t: T, hurst: HurstIndex<T>) -> Result<T> {
    if s < T::zero() || t < T::zero() {
        return Err(Error::Domain(format!(
            "fBm covariance needs non-negative times, got s = {s}, t = {t}"
        )));
    }
    let two_h = hurst.value() + hurst.value();
    let half = T::lit(0.5);
    Ok(half * (abs_pow(s, two_h) + abs_pow(t, two_h) - abs_pow(t - s, two_h)))
}

/// Autocovariance of unit fGn at lag `k`: `ρ(k) = ½(|k+1|^{2H} + |k−1|^{2H} − 2|k|^{2H})`.
pub fn fgn_autocovariance<T: Real>(k: i64, hurst: HurstIndex<T>) -> T {
    let two_h = hurst.value() + hurst.value();
    let k = T::lit(k as f64);
    let one = T::one();
    T::lit(0.5) * (abs_pow(k + one, two_h) + abs_pow(k - one, two_h) - T::lit(2.0) * abs_pow(k, two_h))
}

/// A sequence of fGn increments on a uniform grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FgnSample<T> {
    pub hurst: HurstIndex<T>,
    pub spacing: T,
    pub seed: u64,
    pub increments: Vec<T>,
}

impl<T: Real> FgnSample<T> {
    pub fn new(increments: Vec<T>, spacing: T, hurst: HurstIndex<T>, seed: u64) -> Result<Self> {
        let sample = FgnSample {
            hurst,
            spacing,
            seed,
            increments,
        };
        sample.validate()?;
        Ok(sample)
    }

    pub fn validate(&self) -> Result<()> {
        HurstIndex::new(self.hurst.value())?;
        if self.increments.is_empty() {
            return Err(Error::Domain("fGn sample must hold at least one increment".into()));
        }
        if !(self.spacing > T::zero()) {
            return Err(Error::Domain(format!("spacing must be positive, got {}", self.spacing)));
        }
        Ok(())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.increments.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.increments.is_empty()
    }

    /// Rescales to a new spacing by self-similarity: increments scale as `spacing^H`.
    pub fn rescaled(&self, spacing: T) -> Result<Self> {
        if !(spacing > T::zero()) {
            return Err(Error::Domain(format!("spacing must be positive, got {spacing}")));
        }
        let factor = (spacing / self.spacing).powf(self.hurst.value());
        Ok(FgnSample {
            hurst: self.hurst,
            spacing,
            seed: self.seed,
            increments: self.increments.iter().map(|&x| x * factor).collect(),
        })
    }

    /// Increments divided by `spacing^H`, i.e. unit-variance noise.
    pub fn standardized(&self) -> Vec<T> {
        let scale = self.spacing.powf(self.hurst.value());
        self.increments.iter().map(|&x| x / scale).collect()
    }
}

/// Partial sums `B_{t_0} = 0, B_{t_k} = Σ_{j<k} ΔB_j`; length `n + 1`.
pub fn cumulate<T: Real>(fgn: &FgnSample<T>) -> Vec<T> {
    let mut out = Vec::with_capacity(fgn.len() + 1);
    let mut acc = T::zero();
    out.push(acc);
    for &dx in &fgn.increments {
        acc = acc + dx;
        out.push(acc);
    }
    out
}

/// Exact sampler through the Cholesky factor of the Toeplitz covariance.
#[derive(Debug, Clone)]
pub struct CholeskyFgn<T> {
    hurst: HurstIndex<T>,
    n: usize,
    // row-major lower-triangular factor, n x n
    factor: Vec<T>,
}

impl<T: Real> CholeskyFgn<T> {
    pub fn new(n: usize, hurst: HurstIndex<T>) -> Result<Self> {
        Self::with_cap(n, hurst, DEFAULT_CHOLESKY_CAP)
    }

    pub fn with_cap(n: usize, hurst: HurstIndex<T>, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("fGn length must be at least 1".into()));
        }
        if n > cap {
            return Err(Error::Resource {
                what: "Cholesky fGn length",
                requested: n,
                cap,
            });
        }
        let rho: Vec<T> = (0..n).map(|k| fgn_autocovariance(k as i64, hurst)).collect();
        let mut l = vec![T::zero(); n * n];
        for i in 0..n {
            for j in 0..=i {
                let mut sum = rho[i - j];
                for k in 0..j {
                    sum = sum - l[i * n + k] * l[j * n + k];
                }
                if i == j {
                    if !(sum > T::zero()) {
                        return Err(Error::Internal(format!(
                            "fGn covariance not positive definite at pivot {i} (value {sum})"
                        )));
                    }
                    l[i * n + i] = sum.sqrt();
                } else {
                    l[i * n + j] = sum / l[j * n + j];
                }
            }
        }
        Ok(CholeskyFgn { hurst, n, factor: l })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Row-major lower-triangular factor `L` with `L Lᵀ = [ρ(|i−j|)]`.
    pub fn factor(&self) -> &[T] {
        &self.factor
    }

    /// Writes one unit-spacing path into `out` (length `n`).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [T]) {
        assert_eq!(out.len(), self.n, "output length must equal n");
        let mut z = vec![T::zero(); self.n];
        fill_standard_normal(rng, &mut z);
        for (i, o) in out.iter_mut().enumerate() {
            let row = &self.factor[i * self.n..i * self.n + i + 1];
            *o = row.iter().zip(&z).map(|(&a, &b)| a * b).sum();
        }
    }

    pub fn sample(&self, spacing: T, seed: u64) -> Result<FgnSample<T>> {
        let mut rng = rng::stream(seed);
        let mut out = vec![T::zero(); self.n];
        self.sample_into(&mut rng, &mut out);
        scale_to_spacing(out, spacing, self.hurst, seed)
    }
}

/// Davies–Harte sampler: the covariance is embedded in a circulant of size
/// `m` = first power of two `>= 2n` whose eigenvalues come from one FFT.
#[derive(Clone)]
pub struct CirculantFgn<T: Real> {
    hurst: HurstIndex<T>,
    n: usize,
    // sqrt(λ_j / m)
    scale: Vec<T>,
    min_eigenvalue: T,
    fft: Arc<dyn Fft<T>>,
}

impl<T: Real> std::fmt::Debug for CirculantFgn<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CirculantFgn")
            .field("hurst", &self.hurst)
            .field("n", &self.n)
            .field("embedding", &self.scale.len())
            .field("min_eigenvalue", &self.min_eigenvalue)
            .finish()
    }
}

impl<T: Real> CirculantFgn<T> {
    pub fn new(n: usize, hurst: HurstIndex<T>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("fGn length must be at least 1".into()));
        }
        let m = (2 * n).next_power_of_two();
        let half = m / 2;
        let mut row: Vec<Complex<T>> = vec![Complex::new(T::zero(), T::zero()); m];
        for j in 0..=half {
            let r = fgn_autocovariance(j as i64, hurst);
            row[j] = Complex::new(r, T::zero());
            if j > 0 && j < half {
                row[m - j] = Complex::new(r, T::zero());
            }
        }
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(m);
        fft.process(&mut row);

        let max = row.iter().map(|c| c.re).fold(T::neg_infinity(), T::max);
        let min = row.iter().map(|c| c.re).fold(T::infinity(), T::min);
        let tol = T::lit(EIGENVALUE_TOLERANCE) * max.abs();
        if min < -tol {
            return Err(Error::NegativeEigenvalue {
                min: min.as_f64(),
                tolerance: tol.as_f64(),
            });
        }
        let mf = T::from_count(m);
        let scale = row.iter().map(|c| (c.re.max(T::zero()) / mf).sqrt()).collect();
        Ok(CirculantFgn {
            hurst,
            n,
            scale,
            min_eigenvalue: min,
            fft,
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn hurst(&self) -> HurstIndex<T> {
        self.hurst
    }

    pub fn embedding_size(&self) -> usize {
        self.scale.len()
    }

    /// Smallest eigenvalue of the embedding before clamping.
    pub fn min_eigenvalue(&self) -> T {
        self.min_eigenvalue
    }

    /// Writes one unit-spacing path into `out` (length `n`).
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [T]) {
        assert_eq!(out.len(), self.n, "output length must equal n");
        let m = self.scale.len();
        let mut re = vec![T::zero(); m];
        let mut im = vec![T::zero(); m];
        fill_standard_normal(rng, &mut re);
        fill_standard_normal(rng, &mut im);
        let mut buf: Vec<Complex<T>> = self
            .scale
            .iter()
            .zip(re.iter().zip(&im))
            .map(|(&s, (&a, &b))| Complex::new(s * a, s * b))
            .collect();
        self.fft.process(&mut buf);
        for (o, c) in out.iter_mut().zip(&buf) {
            *o = c.re;
        }
    }

    pub fn sample(&self, spacing: T, seed: u64) -> Result<FgnSample<T>> {
        let mut rng = rng::stream(seed);
        let mut out = vec![T::zero(); self.n];
        self.sample_into(&mut rng, &mut out);
        scale_to_spacing(out, spacing, self.hurst, seed)
    }
}

fn scale_to_spacing<T: Real>(mut unit: Vec<T>, spacing: T, hurst: HurstIndex<T>, seed: u64) -> Result<FgnSample<T>> {
    if !(spacing > T::zero()) {
        return Err(Error::Domain(format!("spacing must be positive, got {spacing}")));
    }
    let factor = spacing.powf(hurst.value());
    for v in unit.iter_mut() {
        *v = *v * factor;
    }
    FgnSample::new(unit, spacing, hurst, seed)
}

/// Exact fGn via Cholesky; `n` is capped at [`DEFAULT_CHOLESKY_CAP`].
pub fn generate_fgn_cholesky<T: Real>(n: usize, hurst: HurstIndex<T>, spacing: T, seed: u64) -> Result<FgnSample<T>> {
    CholeskyFgn::new(n, hurst)?.sample(spacing, seed)
}

/// Exact fGn via circulant embedding, O(n log n).
pub fn generate_fgn_circulant<T: Real>(n: usize, hurst: HurstIndex<T>, spacing: T, seed: u64) -> Result<FgnSample<T>> {
    CirculantFgn::new(n, hurst)?.sample(spacing, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand_distr::{Distribution, StandardNormal};

    fn h(v: f64) -> HurstIndex<f64> {
        HurstIndex::new(v).unwrap()
    }

    #[test]
    fn hurst_bounds() {
        assert!(HurstIndex::new(0.0).is_err());
        assert!(HurstIndex::new(1.0).is_err());
        assert!(HurstIndex::new(f64::NAN).is_err());
        assert!(h(0.5).require_estimation_range().is_err());
        assert!(h(0.51).require_estimation_range().is_ok());
        assert_eq!(h(0.6).regime(), Regime::Gaussian);
        assert_eq!(h(0.75).regime(), Regime::Log);
        assert_eq!(h(0.85).regime(), Regime::Hermite);
    }

    #[test]
    fn covariance_examples() {
        assert_relative_eq!(fbm_covariance(1.0, 1.0, h(0.6)).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(fbm_covariance(1.0, 2.0, h(0.5)).unwrap(), 1.0, epsilon = 1e-15);
        // ½(1 + 2^1.5 − 1)
        let expected = 0.5 * 2f64.powf(1.5);
        assert_relative_eq!(fbm_covariance(1.0, 2.0, h(0.75)).unwrap(), expected, epsilon = 1e-15);
        assert_relative_eq!(expected, std::f64::consts::SQRT_2, epsilon = 1e-7);
        assert!(fbm_covariance(-1.0, 2.0, h(0.6)).is_err());
        let a = fbm_covariance(0.3, 1.7, h(0.7)).unwrap();
        let b = fbm_covariance(1.7, 0.3, h(0.7)).unwrap();
        assert_eq!(a, b);
        assert_relative_eq!(
            fbm_covariance(2.5, 2.5, h(0.7)).unwrap(),
            2.5f64.powf(1.4),
            epsilon = 1e-14
        );
    }

    #[test]
    fn autocovariance_examples() {
        for &hv in &[0.3, 0.5, 0.6, 0.9] {
            assert_relative_eq!(fgn_autocovariance(0, h(hv)), 1.0, epsilon = 1e-15);
            assert_eq!(fgn_autocovariance(3, h(hv)), fgn_autocovariance(-3, h(hv)));
        }
        assert_relative_eq!(fgn_autocovariance(1, h(0.5)), 0.0, epsilon = 1e-15);
        assert_relative_eq!(
            fgn_autocovariance(1, h(0.75)),
            0.5 * (2f64.powf(1.5) - 2.0),
            epsilon = 1e-15
        );
        assert_relative_eq!(fgn_autocovariance(1, h(0.75)), 0.4142136, epsilon = 1e-7);
    }

    #[test]
    fn cumulate_examples() {
        let s = FgnSample::new(vec![1.0, 1.0, 1.0], 1.0, h(0.6), 0).unwrap();
        assert_eq!(cumulate(&s), vec![0.0, 1.0, 2.0, 3.0]);
        let s = FgnSample::new(vec![0.5, -0.5], 1.0, h(0.6), 0).unwrap();
        assert_eq!(cumulate(&s), vec![0.0, 0.5, 0.0]);
        assert!(FgnSample::new(Vec::<f64>::new(), 1.0, h(0.6), 0).is_err());
    }

    #[test]
    fn cholesky_single_draw_is_first_normal() {
        let s = generate_fgn_cholesky(1, h(0.7), 1.0, 99).unwrap();
        let mut rng = rng::stream(99);
        let z: f64 = StandardNormal.sample(&mut rng);
        assert_eq!(s.increments, vec![z]);
    }

    #[test]
    fn cholesky_reconstruction() {
        let n = 256;
        let chol = CholeskyFgn::new(n, h(0.6)).unwrap();
        let l = chol.factor();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let s: f64 = (0..n).map(|k| l[i * n + k] * l[j * n + k]).sum();
                let target = fgn_autocovariance(i as i64 - j as i64, h(0.6));
                worst = worst.max((s - target).abs());
            }
        }
        assert!(worst < 1e-10, "max abs reconstruction error {worst}");
    }

    #[test]
    fn cholesky_cap_enforced() {
        let err = CholeskyFgn::with_cap(100, h(0.6), 64).unwrap_err();
        assert!(matches!(
            err,
            Error::Resource {
                requested: 100,
                cap: 64,
                ..
            }
        ));
        assert!(generate_fgn_cholesky(DEFAULT_CHOLESKY_CAP + 1, h(0.6), 1.0, 0).is_err());
    }

    #[test]
    fn circulant_embedding_size_and_eigenvalues() {
        let g = CirculantFgn::new(1000, h(0.85)).unwrap();
        assert_eq!(g.embedding_size(), 2048);
        let g = CirculantFgn::new(1024, h(0.6)).unwrap();
        assert_eq!(g.embedding_size(), 2048);
        assert!(g.min_eigenvalue() > -1e-10);
        assert!(CirculantFgn::<f64>::new(0, h(0.6)).is_err());
    }

    #[test]
    fn determinism() {
        let a = generate_fgn_circulant(300, h(0.7), 0.1, 5).unwrap();
        let b = generate_fgn_circulant(300, h(0.7), 0.1, 5).unwrap();
        let c = generate_fgn_circulant(300, h(0.7), 0.1, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.increments, c.increments);
        let a = generate_fgn_cholesky(50, h(0.7), 0.1, 5).unwrap();
        let b = generate_fgn_cholesky(50, h(0.7), 0.1, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rescale_and_standardize() {
        let s = generate_fgn_circulant(64, h(0.7), 1.0, 1).unwrap();
        let r = s.rescaled(0.01).unwrap();
        let f = 0.01f64.powf(0.7);
        for (a, b) in s.increments.iter().zip(&r.increments) {
            assert_relative_eq!(a * f, *b, max_relative = 1e-12);
        }
        for (a, b) in s.increments.iter().zip(r.standardized()) {
            assert_relative_eq!(*a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn f32_sampler_runs() {
        let hh = HurstIndex::new(0.7f32).unwrap();
        let s = generate_fgn_circulant(128, hh, 1.0f32, 3).unwrap();
        assert_eq!(s.len(), 128);
        assert!(s.increments.iter().all(|x| x.is_finite()));
    }
}
