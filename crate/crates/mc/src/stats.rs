//! Kolmogorov–Smirnov tests and small descriptive statistics.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{McError, Result};

/// Smallest sample accepted by the KS tests.
pub const KS_MIN_SAMPLE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Kolmogorov survival function `P(K > λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 0.2 {
        // the alternating series converges slowly here and the value is 1 to double precision
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn sorted(sample: &[f64]) -> Result<Vec<f64>> {
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(McError::Config("KS sample contains a non-finite value".into()));
    }
    let mut s = sample.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(s)
}

/// One-sample KS test against `N(mean, variance)`; the p-value uses the
/// asymptotic Kolmogorov law with Stephens' small-sample correction.
pub fn ks_test(sample: &[f64], mean: f64, variance: f64) -> Result<KsResult> {
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(McError::Config(format!(
            "KS target variance must be positive, got {variance}"
        )));
    }
    if sample.len() < KS_MIN_SAMPLE {
        return Err(McError::Config(format!(
            "KS test needs at least {KS_MIN_SAMPLE} points, got {}",
            sample.len()
        )));
    }
    let dist = Normal::new(mean, variance.sqrt()).map_err(|e| McError::Config(e.to_string()))?;
    let s = sorted(sample)?;
    let n = s.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in s.iter().enumerate() {
        let f = dist.cdf(x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d),
        n: s.len(),
    })
}

/// Two-sample KS test with the asymptotic p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.len() < KS_MIN_SAMPLE || b.len() < KS_MIN_SAMPLE {
        return Err(McError::Config(format!(
            "two-sample KS needs at least {KS_MIN_SAMPLE} points per sample"
        )));
    }
    let (a, b) = (sorted(a)?, sorted(b)?);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_sf((ne + 0.12 + 0.11 / ne) * d),
        n: a.len() + b.len(),
    })
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased sample variance.
pub fn variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

pub fn median(x: &[f64]) -> f64 {
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = s.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

pub fn skewness(x: &[f64]) -> f64 {
    let m = mean(x);
    let n = x.len() as f64;
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m3 = x.iter().map(|v| (v - m).powi(3)).sum::<f64>() / n;
    m3 / m2.powf(1.5)
}

/// Excess kurtosis.
pub fn excess_kurtosis(x: &[f64]) -> f64 {
    let m = mean(x);
    let n = x.len() as f64;
    let m2 = x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / n;
    let m4 = x.iter().map(|v| (v - m).powi(4)).sum::<f64>() / n;
    m4 / (m2 * m2) - 3.0
}

pub fn correlation(x: &[f64], y: &[f64]) -> f64 {
    let (mx, my) = (mean(x), mean(y));
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

/// Sample covariance matrix of row vectors, row-major `d × d`.
pub fn covariance_matrix(rows: &[Vec<f64>]) -> Vec<f64> {
    let d = rows.first().map_or(0, |r| r.len());
    let m = rows.len() as f64;
    let means: Vec<f64> = (0..d).map(|i| rows.iter().map(|r| r[i]).sum::<f64>() / m).collect();
    let mut cov = vec![0.0; d * d];
    for r in rows {
        for i in 0..d {
            for j in 0..d {
                cov[i * d + j] += (r[i] - means[i]) * (r[j] - means[j]);
            }
        }
    }
    cov.iter_mut().for_each(|c| *c /= m - 1.0);
    cov
}

/// Empirical CDF points `(x_(i), i/n)` with the standard normal target
/// `Φ((x − mean)/sd)` evaluated alongside.
pub fn ecdf_against_normal(sample: &[f64], mean: f64, variance: f64) -> Result<Vec<(f64, f64, f64)>> {
    let dist = Normal::new(mean, variance.sqrt()).map_err(|e| McError::Config(e.to_string()))?;
    let s = sorted(sample)?;
    let n = s.len() as f64;
    Ok(s.iter()
        .enumerate()
        .map(|(i, &x)| (x, (i + 1) as f64 / n, dist.cdf(x)))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kolmogorov_reference_points() {
        // classical critical values: P(K > 1.3581) = 0.05, P(K > 1.6276) = 0.01
        assert_relative_eq!(kolmogorov_sf(1.3581), 0.05, epsilon = 1e-4);
        assert_relative_eq!(kolmogorov_sf(1.6276), 0.01, epsilon = 1e-4);
        assert_eq!(kolmogorov_sf(0.0), 1.0);
    }

    #[test]
    fn constant_sample_rejected() {
        let r = ks_test(&[0.0; 50], 0.0, 1.0).unwrap();
        assert!(r.statistic >= 0.5);
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn shifted_sample_rejected() {
        let x: Vec<f64> = (0..200).map(|i| 5.0 + ((i as f64 + 0.5) / 200.0 - 0.5)).collect();
        assert!(ks_test(&x, 0.0, 1.0).unwrap().p_value < 1e-10);
    }

    #[test]
    fn quantile_sample_accepted() {
        let dist = Normal::new(0.0, 1.0).unwrap();
        let x: Vec<f64> = (0..1000).map(|i| dist.inverse_cdf((i as f64 + 0.5) / 1000.0)).collect();
        let r = ks_test(&x, 0.0, 1.0).unwrap();
        assert!(r.statistic <= 0.5 / 1000.0 + 1e-9);
        assert!(r.p_value > 0.99);
    }

    #[test]
    fn ks_preconditions() {
        assert!(ks_test(&[0.0; 10], 0.0, 1.0).is_err());
        assert!(ks_test(&[0.0; 30], 0.0, 0.0).is_err());
        assert!(ks_test(&[0.0; 30], 0.0, -1.0).is_err());
    }

    #[test]
    fn two_sample_identical_and_disjoint() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(ks_two_sample(&a, &a).unwrap().statistic, 0.0);
        let b: Vec<f64> = (0..100).map(|i| 1000.0 + i as f64).collect();
        let r = ks_two_sample(&a, &b).unwrap();
        assert_eq!(r.statistic, 1.0);
        assert!(r.p_value < 1e-10);
    }

    #[test]
    fn descriptive() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        assert_relative_eq!(variance(&[1.0, 2.0, 3.0, 4.0]), 5.0 / 3.0);
        assert_relative_eq!(skewness(&[1.0, 2.0, 3.0]), 0.0);
        assert_relative_eq!(correlation(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]), 1.0);
        let cov = covariance_matrix(&[vec![1.0, 2.0], vec![3.0, 6.0]]);
        assert_eq!(cov, vec![2.0, 4.0, 4.0, 8.0]);
    }
}
