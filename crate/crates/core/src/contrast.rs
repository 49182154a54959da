//! The least-squares contrast `Q_n(θ)`, the estimator `θ_n = argmin |Q_n|`,
//! the rate `τ_n^H` and the constants of the limit law.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fbm::{HurstIndex, Regime};
use crate::linalg;
use crate::model::{Drift, ThetaDomain};
use crate::scalar::Real;
use crate::simulate::ObservedPath;

/// `Q_n(θ) = (1/(n h²)) Σ_k [(X_{t_k} − X_{t_{k−1}} − h b(X_{t_{k−1}}, θ))² − σ² h^{2H}]`.
pub fn qn<T: Real>(path: &ObservedPath<T>, drift: &dyn Drift<T>, theta: &[T], sigma: T, hurst: HurstIndex<T>) -> T {
    let h = path.h();
    let n = T::from_count(path.n());
    let centering = sigma * sigma * h.powf(hurst.value() + hurst.value());
    let sum: T = path
        .values
        .windows(2)
        .map(|w| {
            let r = w[1] - w[0] - h * drift.b(w[0], theta);
            r * r - centering
        })
        .sum();
    sum / (n * h * h)
}

/// `(1/(n h)) Σ_k (X_{t_k} − X_{t_{k−1}} − h b(X_{t_{k−1}}, θ)) ∇θ b(X_{t_{k−1}}, θ)`.
///
/// This is the gradient in its conventional printed form; the calculus
/// derivative of [`qn`] equals `−2 ×` this vector.
pub fn grad_qn<T: Real>(path: &ObservedPath<T>, drift: &dyn Drift<T>, theta: &[T]) -> Vec<T> {
    let d = drift.dim();
    let h = path.h();
    let mut acc = vec![T::zero(); d];
    let mut g = vec![T::zero(); d];
    for w in path.values.windows(2) {
        let r = w[1] - w[0] - h * drift.b(w[0], theta);
        drift.grad_theta_b(w[0], theta, &mut g);
        for (a, &gi) in acc.iter_mut().zip(&g) {
            *a = *a + r * gi;
        }
    }
    let norm = T::from_count(path.n()) * h;
    acc.iter().map(|&a| a / norm).collect()
}

/// Classical least-squares criterion `Σ (ΔX − h b(X, θ))²`.
pub fn classical_ls<T: Real>(path: &ObservedPath<T>, drift: &dyn Drift<T>, theta: &[T]) -> T {
    let h = path.h();
    path.values
        .windows(2)
        .map(|w| {
            let r = w[1] - w[0] - h * drift.b(w[0], theta);
            r * r
        })
        .sum()
}

/// Convergence rate `τ_n^H` (natural logarithm at `H = 3/4`).
pub fn rate_tau<T: Real>(n: usize, h: T, hurst: HurstIndex<T>) -> Result<T> {
    hurst.require_estimation_range()?;
    if n < 2 {
        return Err(Error::Domain(format!("rate needs n >= 2, got {n}")));
    }
    if !(h > T::zero()) {
        return Err(Error::Domain(format!("rate needs h > 0, got {h}")));
    }
    let nf = T::from_count(n);
    let two = T::lit(2.0);
    let exp = two - two * hurst.value();
    Ok(match hurst.regime() {
        Regime::Gaussian => nf.sqrt() * h.powf(exp),
        Regime::Log => (nf / nf.ln()).sqrt() * h.powf(exp),
        Regime::Hermite => (nf * h).powf(exp),
    })
}

/// Result of summing `c_H = ½ Σ_{v∈Z} (|v+1|^{2H} + |v−1|^{2H} − 2|v|^{2H})²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesConstant<T> {
    pub value: T,
    /// Symmetric partial sum over `|v| <= terms`.
    pub partial_sum: T,
    /// Asymptotic-expansion estimate of the omitted tail.
    pub tail_estimate: T,
    /// Rigorous upper bound on the omitted tail (integral comparison).
    pub tail_bound: T,
    pub terms: usize,
}

/// Generalised binomial coefficient `C(x, k)`.
fn binomial<T: Real>(x: T, k: usize) -> T {
    let mut c = T::one();
    for i in 0..k {
        c = c * (x - T::from_count(i)) / T::from_count(i + 1);
    }
    c
}

/// Hurwitz zeta `ζ(s, a) = Σ_{k≥0} (a + k)^{−s}` for large `a` by Euler–Maclaurin.
fn hurwitz_zeta_large<T: Real>(s: T, a: T) -> T {
    const BERNOULLI: [f64; 5] = [1.0 / 6.0, -1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0];
    let one = T::one();
    let mut total = a.powf(one - s) / (s - one) + a.powf(-s) / T::lit(2.0);
    // rising factorial s(s+1)…(s+2k−2) / (2k)!
    let mut rising = s;
    let mut fact = T::lit(2.0);
    for (k, &b) in BERNOULLI.iter().enumerate() {
        let k = k + 1;
        total = total + T::lit(b) / fact * rising * a.powf(-s - T::from_count(2 * k - 1));
        rising = rising * (s + T::from_count(2 * k - 1)) * (s + T::from_count(2 * k));
        fact = fact * T::from_count(2 * k + 1) * T::from_count(2 * k + 2);
    }
    total
}

fn c_const_at<T: Real>(hurst: HurstIndex<T>, terms: usize) -> SeriesConstant<T> {
    let hv = hurst.value();
    let two_h = hv + hv;
    let four = T::lit(4.0);
    // c = 2 + 4 Σ_{v≥1} ρ(v)²; summed from the small end of the tail upwards
    let mut partial = T::zero();
    for v in (1..=terms).rev() {
        let r = crate::fbm::fgn_autocovariance(v as i64, hurst);
        partial = partial + r * r;
    }
    // ρ(v) = Σ_{j≥1} C(2H, 2j) v^{2H−2j}, so ρ(v)² = Σ_{m≥2} b_m v^{4H−2m}
    const ORDER: usize = 6;
    let a: Vec<T> = (1..=ORDER).map(|j| binomial(two_h, 2 * j)).collect();
    let start = T::from_count(terms + 1);
    let mut tail = T::zero();
    for m in 2..=ORDER + 1 {
        let bm: T = (1..m)
            .filter(|&j| m - j <= ORDER && j <= ORDER)
            .map(|j| a[j - 1] * a[m - j - 1])
            .sum();
        if bm != T::zero() {
            let s = T::from_count(2 * m) - four * hv;
            tail = tail + bm * hurwitz_zeta_large(s, start);
        }
    }
    // ρ(v) ≤ H(2H−1)(v−1)^{2H−2}; Σ_{v>V} (v−1)^{4H−4} ≤ (V−1)^{4H−3}/(3−4H)
    let lead = hv * (two_h - T::one());
    let three = T::lit(3.0);
    let bound = if lead == T::zero() {
        T::zero()
    } else {
        four * lead * lead * T::from_count(terms - 1).powf(four * hv - three) / (three - four * hv)
    };
    SeriesConstant {
        value: T::lit(2.0) + four * (partial + tail),
        partial_sum: T::lit(2.0) + four * partial,
        tail_estimate: four * tail,
        tail_bound: bound,
        terms,
    }
}

/// The series constant `c_H` for `H < 3/4`.
///
/// A partial sum over `|v| <= V` is completed with an asymptotic expansion
/// of the tail (binomial series of `ρ` plus Hurwitz zeta sums). `V` doubles
/// from 64 until two successive values agree to `rel_tol`.
pub fn c_const<T: Real>(hurst: HurstIndex<T>, rel_tol: T) -> Result<SeriesConstant<T>> {
    if hurst.value() >= T::lit(0.75) || hurst.is_three_quarters() {
        return Err(Error::Divergence {
            hurst: hurst.value().as_f64(),
        });
    }
    if !(rel_tol > T::zero()) {
        return Err(Error::Domain(format!("rel_tol must be positive, got {rel_tol}")));
    }
    let mut terms = 64;
    let mut prev = c_const_at(hurst, terms);
    loop {
        terms *= 2;
        let next = c_const_at(hurst, terms);
        if (next.value - prev.value).abs() <= rel_tol * next.value.abs() || terms >= 1 << 22 {
            return Ok(next);
        }
        prev = next;
    }
}

/// Log-regime variance coefficient at `H = 3/4`: `ρ(k) ≈ (3/8) k^{−1/2}`,
/// so `2 Σ_{|v|≤n} ρ(v)² ≈ (9/16) log n`.
pub const LOG_REGIME_VARIANCE: f64 = 9.0 / 16.0;

/// How the constant `c_H` enters the limit law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceConvention {
    /// `c_H` is the limiting variance: normalise by `√(n c_H)`, covariance `σ² c_H / 4 · I⁻¹`.
    #[default]
    Variance,
    /// Formulas as printed: normalise by `√n c_H`, covariance `σ² c_H² / 4 · I⁻¹`.
    Literal,
}

impl VarianceConvention {
    pub const ALL: [VarianceConvention; 2] = [VarianceConvention::Variance, VarianceConvention::Literal];

    pub fn as_str(self) -> &'static str {
        match self {
            VarianceConvention::Variance => "variance",
            VarianceConvention::Literal => "literal",
        }
    }

    /// Factor applied to `σ²/4 · I⁻¹` (or the squared normaliser) for constant `v`.
    pub fn variance_factor<T: Real>(self, v: T) -> T {
        match self {
            VarianceConvention::Variance => v,
            VarianceConvention::Literal => v * v,
        }
    }
}

impl std::str::FromStr for VarianceConvention {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "variance" => Ok(VarianceConvention::Variance),
            "literal" => Ok(VarianceConvention::Literal),
            other => Err(Error::Domain(format!(
                "unknown variance convention '{other}' (expected 'variance' or 'literal')"
            ))),
        }
    }
}

/// `c_H` for the Gaussian regime, `9/16` at `H = 3/4`; undefined above.
pub fn regime_constant<T: Real>(hurst: HurstIndex<T>) -> Result<T> {
    match hurst.regime() {
        Regime::Gaussian => Ok(c_const(hurst, T::lit(1e-10).max(T::epsilon() * T::lit(16.0)))?.value),
        Regime::Log => Ok(T::lit(LOG_REGIME_VARIANCE)),
        Regime::Hermite => Err(Error::Domain(format!(
            "no variance constant in the Hermite regime (H = {} > 3/4)",
            hurst.value()
        ))),
    }
}

/// Empirical `I(θ) = E[g gᵀ]` and `E[g]`, `g(x) = ∇θ b(x, θ) b(x, θ)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfoEstimate<T> {
    pub dim: usize,
    /// Row-major `d × d`.
    pub matrix: Vec<T>,
    pub mean_vector: Vec<T>,
    pub positive_definite: bool,
    pub samples: usize,
}

impl<T: Real> InfoEstimate<T> {
    /// Same estimate with `matrix = E[g] E[g]ᵀ`.
    pub fn outer_of_mean(&self) -> Self {
        let d = self.dim;
        let matrix: Vec<T> = (0..d * d)
            .map(|i| self.mean_vector[i / d] * self.mean_vector[i % d])
            .collect();
        let positive_definite = linalg::is_positive_definite(&matrix, d);
        InfoEstimate {
            dim: d,
            matrix,
            mean_vector: self.mean_vector.clone(),
            positive_definite,
            samples: self.samples,
        }
    }
}

pub fn info_matrix<T: Real>(stationary_samples: &[T], drift: &dyn Drift<T>, theta: &[T]) -> Result<InfoEstimate<T>> {
    if stationary_samples.is_empty() {
        return Err(Error::Precondition(
            "information estimate needs at least one sample".into(),
        ));
    }
    let d = drift.dim();
    let mut matrix = vec![T::zero(); d * d];
    let mut mean = vec![T::zero(); d];
    let mut g = vec![T::zero(); d];
    for &x in stationary_samples {
        drift.grad_theta_b(x, theta, &mut g);
        let bx = drift.b(x, theta);
        g.iter_mut().for_each(|v| *v = *v * bx);
        for i in 0..d {
            mean[i] = mean[i] + g[i];
            for j in 0..d {
                matrix[i * d + j] = matrix[i * d + j] + g[i] * g[j];
            }
        }
    }
    let m = T::from_count(stationary_samples.len());
    matrix.iter_mut().for_each(|v| *v = *v / m);
    mean.iter_mut().for_each(|v| *v = *v / m);
    let positive_definite = linalg::is_positive_definite(&matrix, d);
    Ok(InfoEstimate {
        dim: d,
        matrix,
        mean_vector: mean,
        positive_definite,
        samples: stationary_samples.len(),
    })
}

/// Limit law of `τ_n^H (θ_n − θ₀)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AsymptoticLaw<T> {
    /// Centred normal with row-major covariance.
    Gaussian { dim: usize, covariance: Vec<T> },
    /// `coefficient · Z` with `Z` a Hermite (Rosenblatt) variable.
    Hermite { coefficient: Vec<T> },
}

/// `σ² v / 4 · I⁻¹` under [`VarianceConvention::Variance`], `σ² v² / 4 · I⁻¹` under `Literal`.
pub fn gaussian_covariance<T: Real>(
    sigma: T,
    v: T,
    info: &[T],
    dim: usize,
    convention: VarianceConvention,
) -> Result<Vec<T>> {
    let inv = linalg::invert(info, dim)?;
    let f = sigma * sigma * convention.variance_factor(v) / T::lit(4.0);
    Ok(inv.iter().map(|&x| x * f).collect())
}

pub fn asym_cov<T: Real>(
    hurst: HurstIndex<T>,
    sigma: T,
    info: &InfoEstimate<T>,
    convention: VarianceConvention,
) -> Result<AsymptoticLaw<T>> {
    hurst.require_estimation_range()?;
    match hurst.regime() {
        Regime::Gaussian | Regime::Log => {
            let v = regime_constant(hurst)?;
            Ok(AsymptoticLaw::Gaussian {
                dim: info.dim,
                covariance: gaussian_covariance(sigma, v, &info.matrix, info.dim, convention)?,
            })
        }
        Regime::Hermite => {
            let inv = linalg::invert(&info.matrix, info.dim)?;
            let half = sigma / T::lit(2.0);
            let coefficient = linalg::mat_vec(&inv, &info.mean_vector)
                .into_iter()
                .map(|x| x * half)
                .collect();
            Ok(AsymptoticLaw::Hermite { coefficient })
        }
    }
}

/// `c_H` (absent in the Hermite regime), `τ_n^H`, `Î` and the limit law.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitConstants<T> {
    pub c_const: Option<T>,
    pub tau: T,
    pub info: InfoEstimate<T>,
    pub asym: AsymptoticLaw<T>,
    pub convention: VarianceConvention,
}

impl<T: Real> LimitConstants<T> {
    pub fn new(
        n: usize,
        h: T,
        hurst: HurstIndex<T>,
        sigma: T,
        info: InfoEstimate<T>,
        convention: VarianceConvention,
    ) -> Result<Self> {
        let c_const = match hurst.regime() {
            Regime::Hermite => None,
            _ => Some(regime_constant(hurst)?),
        };
        Ok(LimitConstants {
            c_const,
            tau: rate_tau(n, h, hurst)?,
            asym: asym_cov(hurst, sigma, &info, convention)?,
            info,
            convention,
        })
    }
}

/// Multistart settings for [`estimate_lse`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptConfig {
    /// Total number of starting points (box corners, centre, then Halton points).
    pub starts: usize,
    /// Target for `Q_n²`.
    pub q2_tol: f64,
    /// Target for θ, relative to the box width.
    pub theta_tol: f64,
    pub max_iter: usize,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            starts: 8,
            q2_tol: 1e-10,
            theta_tol: 1e-8,
            max_iter: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate<T> {
    pub theta: Vec<T>,
    pub abs_qn: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry<T> {
    pub start: Vec<T>,
    pub method: String,
    pub iterations: usize,
    pub evaluations: usize,
    pub theta: Vec<T>,
    pub abs_qn: T,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimationResult<T> {
    pub theta_hat: Vec<T>,
    pub qn_at_opt: T,
    pub abs_qn_at_opt: T,
    /// `|Q_n(θ_n)| · ‖∇θ Q_n(θ_n)‖` with the printed gradient.
    pub stationarity_residual: T,
    pub boundary: bool,
    pub candidates: Vec<Candidate<T>>,
    pub optimizer_trace: Vec<TraceEntry<T>>,
    pub n: usize,
    pub h: T,
}

struct Objective<'a, T: Real> {
    path: &'a ObservedPath<T>,
    drift: &'a dyn Drift<T>,
    sigma: T,
    hurst: HurstIndex<T>,
    evaluations: std::cell::Cell<usize>,
}

impl<T: Real> Objective<'_, T> {
    fn q(&self, theta: &[T]) -> T {
        self.evaluations.set(self.evaluations.get() + 1);
        qn(self.path, self.drift, theta, self.sigma, self.hurst)
    }

    /// `Q`, and the gradient of `Q²`: `2 Q ∂θQ = 2 Q (−2 grad_qn)`.
    fn q_and_grad_sq(&self, theta: &[T]) -> (T, Vec<T>) {
        let q = self.q(theta);
        let g = grad_qn(self.path, self.drift, theta);
        let f = T::lit(-4.0) * q;
        (q, g.into_iter().map(|v| v * f).collect())
    }
}

fn starting_points<T: Real>(domain: &ThetaDomain<T>, count: usize) -> Vec<Vec<T>> {
    let d = domain.dim();
    let mut starts = Vec::new();
    if d <= 3 {
        for mask in 0..(1usize << d) {
            starts.push(
                (0..d)
                    .map(|i| {
                        if mask >> i & 1 == 1 {
                            domain.upper[i]
                        } else {
                            domain.lower[i]
                        }
                    })
                    .collect(),
            );
        }
    }
    starts.push(domain.center());
    let extra = count.saturating_sub(starts.len()).max(3);
    starts.extend(domain.quasi_random_points(extra));
    starts
}

/// Brent's method for a root of `f` on `[a, b]` with `f(a) f(b) <= 0`.
fn brent_root<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T, tol: T, max_iter: usize) -> (T, usize) {
    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == T::zero() {
        return (a, 0);
    }
    if fb == T::zero() {
        return (b, 0);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for it in 0..max_iter {
        if (fb > T::zero()) == (fc > T::zero()) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = two * T::epsilon() * b.abs() + half * tol;
        let xm = half * (c - b);
        if xm.abs() <= tol1 || fb == T::zero() {
            return (b, it);
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = two * xm * s;
                q = T::one() - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (two * xm * qq * (qq - r) - (b - a) * (r - T::one()));
                q = (qq - T::one()) * (r - T::one()) * (s - T::one());
            }
            if p > T::zero() {
                q = -q;
            }
            p = p.abs();
            let min1 = T::lit(3.0) * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if two * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b = if d.abs() > tol1 { b + d } else { b + tol1 * xm.signum() };
        fb = f(b);
    }
    (b, max_iter)
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
fn golden_min<T: Real, F: Fn(T) -> T>(f: F, mut a: T, mut b: T, tol: T, max_iter: usize) -> (T, usize) {
    let g = T::lit((5f64.sqrt() - 1.0) / 2.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut it = 0;
    while (b - a).abs() > tol && it < max_iter {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
        it += 1;
    }
    let mid = (a + b) / T::lit(2.0);
    // endpoints can win when the minimum sits on the bracket edge
    let best = [(a, f(a)), (mid, f(mid)), (b, f(b))]
        .into_iter()
        .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap()
        .0;
    (best, it)
}

fn search_1d<T: Real>(obj: &Objective<'_, T>, domain: &ThetaDomain<T>, cfg: &OptConfig) -> Vec<TraceEntry<T>> {
    let (lo, hi) = (domain.lower[0], domain.upper[0]);
    let width = hi - lo;
    let tol = T::lit(cfg.theta_tol) * width * T::lit(1e-3);
    let mut grid: Vec<T> = starting_points(domain, cfg.starts).into_iter().map(|p| p[0]).collect();
    grid.sort_by(|a, b| a.partial_cmp(b).unwrap());
    grid.dedup();
    let values: Vec<T> = grid.iter().map(|&t| obj.q(&[t])).collect();
    let mut trace = Vec::new();
    let mut record = |start: Vec<T>, method: &str, theta: T, iters: usize, evals: usize| {
        trace.push(TraceEntry {
            start,
            method: method.to_string(),
            iterations: iters,
            evaluations: evals,
            theta: vec![theta],
            abs_qn: obj.q(&[theta]).abs(),
            converged: iters < cfg.max_iter,
        });
    };
    for i in 0..grid.len() - 1 {
        let (a, b) = (grid[i], grid[i + 1]);
        let before = obj.evaluations.get();
        if values[i] * values[i + 1] <= T::zero() {
            let (t, it) = brent_root(|t| obj.q(&[t]), a, b, tol, cfg.max_iter);
            record(vec![a, b], "brent-root", t, it, obj.evaluations.get() - before);
            continue;
        }
        // Same sign s at both ends: minimise s·Q. A sign change at the
        // extremum means two roots, one on each side.
        let s = if values[i] > T::zero() { T::one() } else { -T::one() };
        // d/dθ Q = −2 grad_qn; a sign change of the slope brackets the extremum
        let slope = |t: T| T::lit(-2.0) * grad_qn(obj.path, obj.drift, &[t])[0];
        let (sa, sb) = (s * slope(a), s * slope(b));
        let (t, it) = if sa < T::zero() && sb > T::zero() {
            brent_root(slope, a, b, tol, cfg.max_iter)
        } else {
            golden_min(|t| s * obj.q(&[t]), a, b, tol, cfg.max_iter)
        };
        let qt = obj.q(&[t]);
        if s * qt < T::zero() {
            let (r1, i1) = brent_root(|t| obj.q(&[t]), a, t, tol, cfg.max_iter);
            record(
                vec![a, t],
                "golden-bracket-brent",
                r1,
                it + i1,
                obj.evaluations.get() - before,
            );
            let mid = obj.evaluations.get();
            let (r2, i2) = brent_root(|t| obj.q(&[t]), t, b, tol, cfg.max_iter);
            record(vec![t, b], "golden-bracket-brent", r2, i2, obj.evaluations.get() - mid);
        } else {
            record(vec![a, b], "golden-section", t, it, obj.evaluations.get() - before);
        }
    }
    trace
}

/// Projected BFGS on `Q²` over the closed box.
fn search_nd<T: Real>(obj: &Objective<'_, T>, domain: &ThetaDomain<T>, cfg: &OptConfig) -> Vec<TraceEntry<T>> {
    let d = domain.dim();
    let q2_tol = T::lit(cfg.q2_tol);
    let widths: Vec<T> = domain.lower.iter().zip(&domain.upper).map(|(&l, &u)| u - l).collect();
    let theta_tol = T::lit(cfg.theta_tol);
    let mut trace = Vec::new();
    for start in starting_points(domain, cfg.starts) {
        let before = obj.evaluations.get();
        let mut x = start.clone();
        domain.project(&mut x);
        let (mut q, mut g) = obj.q_and_grad_sq(&x);
        let mut f = q * q;
        let mut hinv: Vec<T> = (0..d * d)
            .map(|i| if i / d == i % d { T::one() } else { T::zero() })
            .collect();
        let mut iters = 0;
        let mut converged = false;
        while iters < cfg.max_iter {
            if f <= q2_tol {
                converged = true;
                break;
            }
            // free variables: not pinned at a bound by the gradient
            let free: Vec<bool> = (0..d)
                .map(|i| {
                    let at_lo = x[i] <= domain.lower[i] && g[i] > T::zero();
                    let at_hi = x[i] >= domain.upper[i] && g[i] < T::zero();
                    !(at_lo || at_hi)
                })
                .collect();
            let mut p: Vec<T> = (0..d)
                .map(|i| {
                    if !free[i] {
                        return T::zero();
                    }
                    -(0..d).filter(|&k| free[k]).map(|k| hinv[i * d + k] * g[k]).sum::<T>()
                })
                .collect();
            let mut slope: T = p.iter().zip(&g).map(|(&a, &b)| a * b).sum();
            if !(slope < T::zero()) {
                hinv.iter_mut()
                    .enumerate()
                    .for_each(|(i, v)| *v = if i / d == i % d { T::one() } else { T::zero() });
                p = (0..d).map(|i| if free[i] { -g[i] } else { T::zero() }).collect();
                slope = p.iter().zip(&g).map(|(&a, &b)| a * b).sum();
                if !(slope < T::zero()) {
                    converged = true;
                    break;
                }
            }
            // cap the step at a quarter of the box in every coordinate
            let reach = p
                .iter()
                .zip(&widths)
                .map(|(&pi, &w)| pi.abs() / (T::lit(0.25) * w))
                .fold(T::zero(), |a, b| a.max(b));
            let mut t = if reach > T::one() { T::one() / reach } else { T::one() };
            let mut accepted = None;
            for _ in 0..60 {
                let mut xn: Vec<T> = x.iter().zip(&p).map(|(&a, &b)| a + t * b).collect();
                domain.project(&mut xn);
                let (qn_, gn) = obj.q_and_grad_sq(&xn);
                let fnew = qn_ * qn_;
                let decrease: T = x.iter().zip(&xn).zip(&g).map(|((&a, &b), &gg)| (b - a) * gg).sum();
                if fnew <= f + T::lit(1e-4) * decrease.min(T::zero()) && fnew.is_finite() {
                    accepted = Some((xn, qn_, gn, fnew));
                    break;
                }
                t = t * T::lit(0.5);
            }
            let Some((xn, qn_, gn, fnew)) = accepted else {
                break;
            };
            let s: Vec<T> = xn.iter().zip(&x).map(|(&a, &b)| a - b).collect();
            let y: Vec<T> = gn.iter().zip(&g).map(|(&a, &b)| a - b).collect();
            let step_small = s.iter().zip(&widths).all(|(&si, &w)| si.abs() <= theta_tol * w);
            let sy: T = s.iter().zip(&y).map(|(&a, &b)| a * b).sum();
            if sy > T::epsilon() {
                let hy = linalg::mat_vec(&hinv, &y);
                let yhy: T = y.iter().zip(&hy).map(|(&a, &b)| a * b).sum();
                let rho = T::one() / sy;
                for i in 0..d {
                    for k in 0..d {
                        hinv[i * d + k] = hinv[i * d + k] + rho * rho * (sy + yhy) * s[i] * s[k]
                            - rho * (hy[i] * s[k] + s[i] * hy[k]);
                    }
                }
            }
            x = xn;
            q = qn_;
            g = gn;
            f = fnew;
            iters += 1;
            if step_small {
                converged = true;
                break;
            }
        }
        trace.push(TraceEntry {
            start,
            method: "projected-bfgs".into(),
            iterations: iters,
            evaluations: obj.evaluations.get() - before,
            theta: x,
            abs_qn: q.abs(),
            converged,
        });
    }
    trace
}

/// `θ_n = argmin_{θ ∈ Θ} |Q_n(θ)|` by multistart local search.
///
/// In one dimension the starts partition the interval; brackets with a sign
/// change are solved with Brent's method and the others are searched with
/// golden section on `Q²`. In higher dimensions each start runs projected
/// BFGS on `Q²`. Candidates are ordered by `|Q_n|`; exact ties go to the
/// lexicographically smallest θ.
pub fn estimate_lse<T: Real>(
    path: &ObservedPath<T>,
    drift: &dyn Drift<T>,
    sigma: T,
    hurst: HurstIndex<T>,
    domain: &ThetaDomain<T>,
    cfg: &OptConfig,
) -> Result<EstimationResult<T>> {
    path.validate()?;
    domain.validate()?;
    if path.n() < 1 {
        return Err(Error::Precondition("estimation needs at least one increment".into()));
    }
    if domain.dim() != drift.dim() {
        return Err(Error::Domain(format!(
            "parameter box has dimension {} but drift '{}' has dimension {}",
            domain.dim(),
            drift.name(),
            drift.dim()
        )));
    }
    let obj = Objective {
        path,
        drift,
        sigma,
        hurst,
        evaluations: std::cell::Cell::new(0),
    };
    let trace = if domain.dim() == 1 {
        search_1d(&obj, domain, cfg)
    } else {
        search_nd(&obj, domain, cfg)
    };

    let widths: Vec<T> = domain.lower.iter().zip(&domain.upper).map(|(&l, &u)| u - l).collect();
    let same = |a: &[T], b: &[T]| {
        a.iter()
            .zip(b)
            .zip(&widths)
            .all(|((&x, &y), &w)| (x - y).abs() <= T::lit(cfg.theta_tol) * w)
    };
    let mut candidates: Vec<Candidate<T>> = Vec::new();
    for e in &trace {
        if !e.abs_qn.is_finite() || e.theta.iter().any(|t| !t.is_finite()) {
            continue;
        }
        if let Some(c) = candidates.iter_mut().find(|c| same(&c.theta, &e.theta)) {
            if e.abs_qn < c.abs_qn {
                c.theta = e.theta.clone();
                c.abs_qn = e.abs_qn;
            }
        } else {
            candidates.push(Candidate {
                theta: e.theta.clone(),
                abs_qn: e.abs_qn,
            });
        }
    }
    if candidates.is_empty() {
        return Err(Error::Optimization("no candidate with a finite contrast value".into()));
    }
    // Roots within the |Q_n| target of the best one are ties. Among them
    // the classical least-squares criterion decides, then the lexicographically
    // smallest θ. On roots the classical criterion equals n h² Q_n + n σ² h^{2H},
    // so it separates ties only when their |Q_n| differ.
    let lex = |a: &[T], b: &[T]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.partial_cmp(y).unwrap())
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    };
    let tie = T::lit(cfg.q2_tol).sqrt();
    let best_abs = candidates.iter().map(|c| c.abs_qn).fold(T::infinity(), |a, b| a.min(b));
    // roots tie within the |Q_n| target; other minima only when numerically equal
    let band = if best_abs <= tie {
        tie
    } else {
        best_abs * T::epsilon() * T::lit(64.0)
    };
    let (mut tied, mut rest): (Vec<Candidate<T>>, Vec<Candidate<T>>) =
        candidates.into_iter().partition(|c| c.abs_qn <= best_abs + band);
    tied.sort_by(|a, b| lex(&a.theta, &b.theta));
    let ls: Vec<T> = tied.iter().map(|c| classical_ls(path, drift, &c.theta)).collect();
    let ls_min = ls.iter().fold(T::infinity(), |a, &b| a.min(b));
    let h = path.h();
    let ls_tie = T::lit(2.0) * T::from_count(path.n()) * h * h * tie;
    let pick = ls.iter().position(|&v| v <= ls_min + ls_tie).unwrap_or(0);
    let chosen = tied.remove(pick);
    rest.sort_by(|a, b| {
        a.abs_qn
            .partial_cmp(&b.abs_qn)
            .unwrap()
            .then_with(|| lex(&a.theta, &b.theta))
    });
    let candidates: Vec<Candidate<T>> = std::iter::once(chosen).chain(tied).chain(rest).collect();
    let best = candidates[0].clone();
    let q = qn(path, drift, &best.theta, sigma, hurst);
    let grad_norm = grad_qn(path, drift, &best.theta)
        .iter()
        .map(|&g| g * g)
        .sum::<T>()
        .sqrt();
    Ok(EstimationResult {
        boundary: domain.on_boundary(&best.theta, T::lit(1e-9)),
        theta_hat: best.theta,
        qn_at_opt: q,
        abs_qn_at_opt: q.abs(),
        stationarity_residual: q.abs() * grad_norm,
        candidates,
        optimizer_trace: trace,
        n: path.n(),
        h: path.h(),
    })
}

/// For `b(x, θ) = −θ x`: `Q_n(θ) = a + 2 b θ + c θ²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FouQuadratic<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

impl<T: Real> FouQuadratic<T> {
    pub fn from_path(path: &ObservedPath<T>, sigma: T, hurst: HurstIndex<T>) -> Self {
        let h = path.h();
        let n = T::from_count(path.n());
        let centering = sigma * sigma * h.powf(hurst.value() + hurst.value());
        let (mut sa, mut sb, mut sc) = (T::zero(), T::zero(), T::zero());
        for w in path.values.windows(2) {
            let dx = w[1] - w[0];
            sa = sa + dx * dx - centering;
            sb = sb + w[0] * dx;
            sc = sc + w[0] * w[0];
        }
        FouQuadratic {
            a: sa / (n * h * h),
            b: sb / (n * h),
            c: sc / n,
        }
    }

    pub fn eval(&self, theta: T) -> T {
        self.a + T::lit(2.0) * self.b * theta + self.c * theta * theta
    }

    /// Real roots in increasing order.
    pub fn roots(&self) -> Vec<T> {
        if self.c == T::zero() {
            return if self.b == T::zero() {
                vec![]
            } else {
                vec![-self.a / (T::lit(2.0) * self.b)]
            };
        }
        let disc = self.b * self.b - self.a * self.c;
        if disc < T::zero() {
            return vec![];
        }
        let s = disc.sqrt();
        let mut r = vec![(-self.b - s) / self.c, (-self.b + s) / self.c];
        r.sort_by(|x, y| x.partial_cmp(y).unwrap());
        r
    }

    /// `argmin |Q_n|` over the closed interval, ties to the smaller θ.
    pub fn argmin_abs(&self, lower: T, upper: T) -> T {
        let inside: Vec<T> = self.roots().into_iter().filter(|&r| r > lower && r < upper).collect();
        if let Some(&r) = inside.first() {
            return r;
        }
        let mut pts = vec![lower, upper];
        if self.c != T::zero() {
            pts.push((-self.b / self.c).max(lower).min(upper));
        }
        pts.into_iter()
            .min_by(|&x, &y| {
                self.eval(x)
                    .abs()
                    .partial_cmp(&self.eval(y).abs())
                    .unwrap()
                    .then(x.partial_cmp(&y).unwrap())
            })
            .unwrap()
    }
}
