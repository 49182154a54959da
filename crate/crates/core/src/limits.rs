//! Limit-theorem statistics: normalised quadratic variations of fGn,
//! discrete ergodic averages, weighted increment sums and the
//! decomposition of `τ_n^H Q_n(θ_n)`.

use serde::{Deserialize, Serialize};

use crate::contrast::{qn, rate_tau, regime_constant, VarianceConvention};
use crate::error::{Error, Result};
use crate::fbm::{FgnSample, HurstIndex, Regime};
use crate::model::Drift;
use crate::scalar::Real;
use crate::simulate::ObservedPath;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HermiteStatResult<T> {
    pub regime: Regime,
    pub statistic: T,
    pub normalization: T,
}

/// Normaliser of `Σ (ΔB_k² − 1)` for `n` unit-variance increments.
pub fn hermite_normalization<T: Real>(n: usize, hurst: HurstIndex<T>, convention: VarianceConvention) -> Result<T> {
    let nf = T::from_count(n);
    match hurst.regime() {
        Regime::Gaussian => {
            let v = regime_constant(hurst)?;
            Ok(match convention {
                VarianceConvention::Variance => (nf * v).sqrt(),
                VarianceConvention::Literal => nf.sqrt() * v,
            })
        }
        Regime::Log => {
            if n < 2 {
                return Err(Error::Domain(format!("log-regime normalisation needs n >= 2, got {n}")));
            }
            let v = regime_constant(hurst)?;
            let base = nf * nf.ln();
            Ok(match convention {
                VarianceConvention::Variance => (base * v).sqrt(),
                VarianceConvention::Literal => base.sqrt() * v,
            })
        }
        Regime::Hermite => Ok(nf.powf(hurst.value() + hurst.value() - T::one())),
    }
}

/// `Σ (ΔB_k² − 1)` over the standardised increments, divided by the regime normaliser.
pub fn hermite_stat<T: Real>(fgn: &FgnSample<T>) -> Result<HermiteStatResult<T>> {
    hermite_stat_with(fgn, VarianceConvention::Variance)
}

pub fn hermite_stat_with<T: Real>(fgn: &FgnSample<T>, convention: VarianceConvention) -> Result<HermiteStatResult<T>> {
    fgn.validate()?;
    let normalization = hermite_normalization(fgn.len(), fgn.hurst, convention)?;
    let sum: T = fgn.standardized().into_iter().map(|x| x * x - T::one()).sum();
    Ok(HermiteStatResult {
        regime: fgn.hurst.regime(),
        statistic: sum / normalization,
        normalization,
    })
}

/// `(1/n) Σ_{k=1..n} f(X_{t_{k−1}}, θ)`.
pub fn ergodic_average<T: Real, F: Fn(T, &[T]) -> T>(path: &ObservedPath<T>, f: F, theta: &[T]) -> T {
    let n = path.n();
    let sum: T = path.values[..n].iter().map(|&x| f(x, theta)).sum();
    sum / T::from_count(n)
}

/// `(1/(n h)) Σ_{k=1..n} f(X_{t_{k−1}}, θ) (B_{t_k} − B_{t_{k−1}})`.
pub fn weighted_increment_sum<T: Real, F: Fn(T, &[T]) -> T>(path: &ObservedPath<T>, f: F, theta: &[T]) -> Result<T> {
    let db = path.require_increments()?;
    let sum: T = path.values.iter().zip(db).map(|(&x, &d)| f(x, theta) * d).sum();
    Ok(sum / (T::from_count(path.n()) * path.h()))
}

/// `τ_n^H Q_n(θ_n) = (i) + (ii) + remainder`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition<T> {
    /// `ζ_n = τ_n^H (θ₀ − θ_n)`.
    pub zeta: Vec<T>,
    pub tau: T,
    pub scaled_contrast: T,
    /// `τ (1/(n h²)) Σ [σ² ΔB² − σ² h^{2H}]`.
    pub hermite_term: T,
    /// `(2σ/(n h)) Σ ΔB ∇θb(X, θ₀) · ζ_n`.
    pub weighted_term: T,
    pub remainder: T,
}

pub fn lemma3_decomposition<T: Real>(
    path: &ObservedPath<T>,
    drift: &dyn Drift<T>,
    theta_hat: &[T],
    sigma: T,
    hurst: HurstIndex<T>,
) -> Result<Decomposition<T>> {
    let db = path.require_increments()?;
    let theta0 = path
        .theta_true
        .as_deref()
        .ok_or_else(|| Error::Precondition("path carries no true parameter".into()))?;
    if theta0.len() != drift.dim() || theta_hat.len() != drift.dim() {
        return Err(Error::Domain("parameter dimension does not match the drift".into()));
    }
    let n = path.n();
    let h = path.h();
    let tau = rate_tau(n, h, hurst)?;
    let zeta: Vec<T> = theta0.iter().zip(theta_hat).map(|(&a, &b)| tau * (a - b)).collect();
    let nf = T::from_count(n);
    let s2 = sigma * sigma;
    let centering = h.powf(hurst.value() + hurst.value());
    let hermite_sum: T = db.iter().map(|&d| s2 * (d * d - centering)).sum();
    let hermite_term = tau * hermite_sum / (nf * h * h);

    let d = drift.dim();
    let mut g = vec![T::zero(); d];
    let mut acc = vec![T::zero(); d];
    for (&x, &dbk) in path.values.iter().zip(db) {
        drift.grad_theta_b(x, theta0, &mut g);
        for (a, &gi) in acc.iter_mut().zip(&g) {
            *a = *a + dbk * gi;
        }
    }
    let scale = T::lit(2.0) * sigma / (nf * h);
    let weighted_term = acc.iter().zip(&zeta).map(|(&a, &z)| scale * a * z).sum();

    let scaled_contrast = tau * qn(path, drift, theta_hat, sigma, hurst);
    Ok(Decomposition {
        zeta,
        tau,
        scaled_contrast,
        hermite_term,
        weighted_term,
        remainder: scaled_contrast - hermite_term - weighted_term,
    })
}

/// Horizon-doubling comparison of an ergodic average.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErgodicReport<T> {
    pub half_horizon: T,
    pub full_horizon: T,
    pub relative_change: T,
}

/// Ergodic average over the first half of the path and over the whole path.
pub fn ergodic_doubling<T: Real, F: Fn(T, &[T]) -> T>(
    path: &ObservedPath<T>,
    f: F,
    theta: &[T],
) -> Result<ErgodicReport<T>> {
    let n = path.n();
    if n < 2 {
        return Err(Error::Precondition("horizon doubling needs n >= 2".into()));
    }
    let half = n / 2;
    let first: T = path.values[..half].iter().map(|&x| f(x, theta)).sum::<T>() / T::from_count(half);
    let full = ergodic_average(path, &f, theta);
    Ok(ErgodicReport {
        half_horizon: first,
        full_horizon: full,
        relative_change: (full - first).abs() / full.abs(),
    })
}
