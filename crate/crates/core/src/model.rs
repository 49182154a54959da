//! Parametric drift families `b(x, θ)` and numerical checks of the
//! regularity and ergodicity assumptions they must satisfy.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Open box `Θ = Π (lower_i, upper_i) ⊂ R^d`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaDomain<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> ThetaDomain<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        let d = ThetaDomain { lower, upper };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lower.is_empty() || self.lower.len() != self.upper.len() {
            return Err(Error::Domain(format!(
                "parameter box needs matching non-empty bounds, got {} lower and {} upper",
                self.lower.len(),
                self.upper.len()
            )));
        }
        for (i, (&lo, &hi)) in self.lower.iter().zip(&self.upper).enumerate() {
            if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Domain(format!(
                    "parameter box component {i}: need finite lower < upper, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Strict membership in the open box.
    pub fn contains(&self, theta: &[T]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(&t, (&lo, &hi))| t > lo && t < hi)
    }

    /// Projection onto the closed box.
    pub fn project(&self, theta: &mut [T]) {
        for (t, (&lo, &hi)) in theta.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *t = t.max(lo).min(hi);
        }
    }

    pub fn on_boundary(&self, theta: &[T], tol: T) -> bool {
        theta
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .any(|(&t, (&lo, &hi))| {
                let w = hi - lo;
                (t - lo).abs() <= tol * w || (hi - t).abs() <= tol * w
            })
    }

    pub fn center(&self) -> Vec<T> {
        let half = T::lit(0.5);
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(&lo, &hi)| half * (lo + hi))
            .collect()
    }

    /// Maps a point of the unit cube into the box.
    pub fn from_unit(&self, u: &[T]) -> Vec<T> {
        u.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(&u, (&lo, &hi))| lo + u * (hi - lo))
            .collect()
    }

    /// The `count` first points of the Halton sequence (indices 1..=count), mapped into the box.
    pub fn quasi_random_points(&self, count: usize) -> Vec<Vec<T>> {
        (1..=count)
            .map(|i| {
                let u: Vec<T> = (0..self.dim())
                    .map(|j| T::lit(radical_inverse(i as u64, nth_prime(j))))
                    .collect();
                self.from_unit(&u)
            })
            .collect()
    }
}

fn nth_prime(j: usize) -> u64 {
    const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
    PRIMES[j % PRIMES.len()]
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

/// A drift family `b(·, θ): R → R` with its derivative evaluators.
///
/// Vector outputs are written into caller-provided slices of length `dim()`
/// (or `dim()²`, row-major, for the Hessian) so that hot loops do not allocate.
/// Implementations must be pure.
pub trait Drift<T: Real>: Send + Sync {
    fn name(&self) -> &str;

    /// Parameter dimension `d`.
    fn dim(&self) -> usize;

    fn b(&self, x: T, theta: &[T]) -> T;

    fn grad_theta_b(&self, x: T, theta: &[T], out: &mut [T]);

    fn dx_b(&self, x: T, theta: &[T]) -> T;

    fn grad_theta_dx_b(&self, x: T, theta: &[T], out: &mut [T]);

    fn hess_theta_b(&self, x: T, theta: &[T], out: &mut [T]);

    /// `U` with `∂x U = b`, when the family has one.
    fn potential(&self, _x: T, _theta: &[T]) -> Option<T> {
        None
    }

    /// Claimed constant `c > 0` with `(b(x,θ) − b(y,θ))(x − y) ≤ −c|x − y|²` on the domain.
    fn dissipativity(&self, domain: &ThetaDomain<T>) -> T;

    /// Claimed polynomial growth degree `N`.
    fn growth_degree(&self) -> u32;

    fn default_domain(&self) -> ThetaDomain<T>;

    fn grad_theta_b_vec(&self, x: T, theta: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        self.grad_theta_b(x, theta, &mut out);
        out
    }
}

/// Fractional Ornstein–Uhlenbeck drift `b(x, θ) = −θ x`, `d = 1`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FouDrift;

impl<T: Real> Drift<T> for FouDrift {
    fn name(&self) -> &str {
        "fou"
    }
    fn dim(&self) -> usize {
        1
    }
    fn b(&self, x: T, theta: &[T]) -> T {
        -theta[0] * x
    }
    fn grad_theta_b(&self, x: T, _theta: &[T], out: &mut [T]) {
        out[0] = -x;
    }
    fn dx_b(&self, _x: T, theta: &[T]) -> T {
        -theta[0]
    }
    fn grad_theta_dx_b(&self, _x: T, _theta: &[T], out: &mut [T]) {
        out[0] = -T::one();
    }
    fn hess_theta_b(&self, _x: T, _theta: &[T], out: &mut [T]) {
        out[0] = T::zero();
    }
    fn potential(&self, x: T, theta: &[T]) -> Option<T> {
        Some(-theta[0] * x * x / T::lit(2.0))
    }
    fn dissipativity(&self, domain: &ThetaDomain<T>) -> T {
        domain.lower[0]
    }
    fn growth_degree(&self) -> u32 {
        1
    }
    fn default_domain(&self) -> ThetaDomain<T> {
        ThetaDomain {
            lower: vec![T::lit(0.1)],
            upper: vec![T::lit(5.0)],
        }
    }
}

/// Cubic drift `b(x, θ) = −θ₁ x − θ₂ x³`, `d = 2`, `θ₁, θ₂ > 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CubicDrift;

impl<T: Real> Drift<T> for CubicDrift {
    fn name(&self) -> &str {
        "cubic"
    }
    fn dim(&self) -> usize {
        2
    }
    fn b(&self, x: T, theta: &[T]) -> T {
        -theta[0] * x - theta[1] * x * x * x
    }
    fn grad_theta_b(&self, x: T, _theta: &[T], out: &mut [T]) {
        out[0] = -x;
        out[1] = -x * x * x;
    }
    fn dx_b(&self, x: T, theta: &[T]) -> T {
        -theta[0] - T::lit(3.0) * theta[1] * x * x
    }
    fn grad_theta_dx_b(&self, x: T, _theta: &[T], out: &mut [T]) {
        out[0] = -T::one();
        out[1] = -T::lit(3.0) * x * x;
    }
    fn hess_theta_b(&self, _x: T, _theta: &[T], out: &mut [T]) {
        out.iter_mut().for_each(|v| *v = T::zero());
    }
    fn potential(&self, x: T, theta: &[T]) -> Option<T> {
        let x2 = x * x;
        Some(-theta[0] * x2 / T::lit(2.0) - theta[1] * x2 * x2 / T::lit(4.0))
    }
    fn dissipativity(&self, domain: &ThetaDomain<T>) -> T {
        // (x³ − y³)(x − y) ≥ 0, so only the linear part contributes.
        domain.lower[0]
    }
    fn growth_degree(&self) -> u32 {
        3
    }
    fn default_domain(&self) -> ThetaDomain<T> {
        ThetaDomain {
            lower: vec![T::lit(0.1), T::lit(0.01)],
            upper: vec![T::lit(5.0), T::lit(5.0)],
        }
    }
}

/// `b ≡ 0`. Not dissipative, so never registered; useful for pure-fBm checks.
#[derive(Debug, Clone, Copy, Default)]
pub struct ZeroDrift;

impl<T: Real> Drift<T> for ZeroDrift {
    fn name(&self) -> &str {
        "zero"
    }
    fn dim(&self) -> usize {
        1
    }
    fn b(&self, _x: T, _theta: &[T]) -> T {
        T::zero()
    }
    fn grad_theta_b(&self, _x: T, _theta: &[T], out: &mut [T]) {
        out[0] = T::zero();
    }
    fn dx_b(&self, _x: T, _theta: &[T]) -> T {
        T::zero()
    }
    fn grad_theta_dx_b(&self, _x: T, _theta: &[T], out: &mut [T]) {
        out[0] = T::zero();
    }
    fn hess_theta_b(&self, _x: T, _theta: &[T], out: &mut [T]) {
        out[0] = T::zero();
    }
    fn potential(&self, _x: T, _theta: &[T]) -> Option<T> {
        Some(T::zero())
    }
    fn dissipativity(&self, _domain: &ThetaDomain<T>) -> T {
        T::zero()
    }
    fn growth_degree(&self) -> u32 {
        0
    }
    fn default_domain(&self) -> ThetaDomain<T> {
        ThetaDomain {
            lower: vec![T::lit(-1.0)],
            upper: vec![T::lit(1.0)],
        }
    }
}

/// Name → drift lookup used by configuration files.
pub struct DriftRegistry<T: Real> {
    drifts: BTreeMap<String, Arc<dyn Drift<T>>>,
}

impl<T: Real> Default for DriftRegistry<T> {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl<T: Real> DriftRegistry<T> {
    pub fn empty() -> Self {
        DriftRegistry {
            drifts: BTreeMap::new(),
        }
    }

    /// Registry holding `fou` and `cubic`.
    pub fn with_builtins() -> Self {
        let mut r = Self::empty();
        r.register("fou", Arc::new(FouDrift));
        r.register("cubic", Arc::new(CubicDrift));
        r
    }

    pub fn register(&mut self, name: &str, drift: Arc<dyn Drift<T>>) {
        self.drifts.insert(name.to_string(), drift);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn Drift<T>>> {
        self.drifts.get(name).cloned().ok_or_else(|| {
            Error::Domain(format!(
                "unknown drift '{name}'; registered drifts: {}",
                self.names().join(", ")
            ))
        })
    }

    pub fn names(&self) -> Vec<String> {
        self.drifts.keys().cloned().collect()
    }
}

/// Probe grid and tolerances for [`validate_assumptions`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbeConfig {
    pub x_min: f64,
    pub x_max: f64,
    pub x_step: f64,
    pub theta_points: usize,
    /// Relative tolerance of the finite-difference derivative checks.
    pub rel_tol: f64,
    /// Relative finite-difference step.
    pub fd_step: f64,
    /// Growth probes at `x_max · 2^j`, `j = 0..growth_octaves`.
    pub growth_octaves: u32,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig {
            x_min: -10.0,
            x_max: 10.0,
            x_step: 0.1,
            theta_points: 8,
            rel_tol: 1e-5,
            fd_step: 1e-4,
            growth_octaves: 5,
        }
    }
}

impl ProbeConfig {
    fn x_grid(&self) -> Vec<f64> {
        let count = ((self.x_max - self.x_min) / self.x_step).round() as usize;
        // k·step rather than accumulation keeps the grid exact
        (0..=count).map(|k| self.x_min + k as f64 * self.x_step).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Cannot be checked from the drift alone; evaluated against stationary samples later.
    Deferred,
    /// Not applicable (e.g. no potential supplied).
    Skipped,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbePoint {
    pub x: f64,
    pub y: Option<f64>,
    pub theta: Vec<f64>,
    pub violation: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssumptionCheck {
    pub assumption: String,
    pub status: CheckStatus,
    pub worst: Option<ProbePoint>,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub drift: String,
    pub checks: Vec<AssumptionCheck>,
}

impl ValidationReport {
    /// True when no check failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != CheckStatus::Fail)
    }

    pub fn check(&self, assumption: &str) -> Option<&AssumptionCheck> {
        self.checks.iter().find(|c| c.assumption == assumption)
    }
}

struct Worst {
    point: Option<ProbePoint>,
}

impl Worst {
    fn new() -> Self {
        Worst { point: None }
    }
    fn offer(&mut self, x: f64, y: Option<f64>, theta: &[f64], violation: f64) {
        if self.point.as_ref().is_none_or(|p| violation > p.violation) {
            self.point = Some(ProbePoint {
                x,
                y,
                theta: theta.to_vec(),
                violation,
            });
        }
    }
}

fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Numerically checks A1 (dissipativity, growth, derivative consistency)
/// and A2 (potential) on a probe grid. A4 and A5 are reported as deferred.
pub fn validate_assumptions<T: Real>(
    drift: &dyn Drift<T>,
    domain: &ThetaDomain<T>,
    probe: &ProbeConfig,
) -> ValidationReport {
    let d = drift.dim();
    let xs = probe.x_grid();
    let thetas: Vec<Vec<T>> = domain.quasi_random_points(probe.theta_points.max(1));
    let thetas_f: Vec<Vec<f64>> = thetas.iter().map(|t| t.iter().map(|v| v.as_f64()).collect()).collect();
    let b = |x: f64, th: &[T]| drift.b(T::lit(x), th).as_f64();
    let mut checks = Vec::new();

    // A1: one-sided Lipschitz condition
    let c = drift.dissipativity(domain).as_f64();
    let mut worst = Worst::new();
    let mut failed = !(c > 0.0);
    for (th, thf) in thetas.iter().zip(&thetas_f) {
        let bx: Vec<f64> = xs.iter().map(|&x| b(x, th)).collect();
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in xs.iter().enumerate().skip(i + 1) {
                let dxy = x - y;
                let lhs = (bx[i] - bx[j]) * dxy;
                let violation = lhs + c * dxy * dxy;
                let slack = 1e-9 * (1.0 + lhs.abs());
                if violation > slack {
                    failed = true;
                }
                worst.offer(x, Some(y), thf, violation);
            }
        }
    }
    checks.push(AssumptionCheck {
        assumption: "A1-dissipativity".into(),
        status: if failed { CheckStatus::Fail } else { CheckStatus::Pass },
        worst: worst.point,
        detail: format!("claimed c = {c}"),
    });

    // A1: polynomial growth of b and its derivatives
    let n_deg = drift.growth_degree() as i32;
    let mut g = vec![T::zero(); d];
    let mut hbuf = vec![T::zero(); d * d];
    let mut magnitudes = |x: f64, th: &[T]| -> [f64; 5] {
        let xt = T::lit(x);
        let norm = |v: &[T]| v.iter().map(|a| a.as_f64().powi(2)).sum::<f64>().sqrt();
        drift.grad_theta_b(xt, th, &mut g);
        let g1 = norm(&g);
        drift.grad_theta_dx_b(xt, th, &mut g);
        let g2 = norm(&g);
        drift.hess_theta_b(xt, th, &mut hbuf);
        let g3 = norm(&hbuf);
        [
            drift.b(xt, th).as_f64().abs(),
            drift.dx_b(xt, th).as_f64().abs(),
            g1,
            g2,
            g3,
        ]
    };
    let mut worst = Worst::new();
    let mut failed = false;
    for (th, thf) in thetas.iter().zip(&thetas_f) {
        let mut inner = [0.0f64; 5];
        for &x in &xs {
            let m = magnitudes(x, th);
            let w = 1.0 + x.abs().powi(n_deg);
            for k in 0..5 {
                inner[k] = inner[k].max(m[k] / w);
            }
        }
        let edge = probe.x_min.abs().max(probe.x_max.abs());
        for j in 0..probe.growth_octaves {
            for sign in [-1.0, 1.0] {
                let x = sign * edge * 2f64.powi(j as i32);
                let m = magnitudes(x, th);
                let w = 1.0 + x.abs().powi(n_deg);
                for k in 0..5 {
                    let ratio = m[k] / w;
                    let allowed = 2.0 * inner[k] + 1e-12;
                    if !(ratio <= allowed) {
                        failed = true;
                    }
                    worst.offer(x, None, thf, ratio - allowed);
                }
            }
        }
    }
    checks.push(AssumptionCheck {
        assumption: "A1-growth".into(),
        status: if failed { CheckStatus::Fail } else { CheckStatus::Pass },
        worst: worst.point,
        detail: format!("claimed N = {n_deg}"),
    });

    // A1: analytic derivatives against central differences
    let tol = probe.rel_tol;
    let step_for = |v: f64| probe.fd_step * v.abs().max(1.0);
    let mut worst = Worst::new();
    let mut failed = false;
    let mut ga = vec![T::zero(); d];
    let mut gp = vec![T::zero(); d];
    let mut gm = vec![T::zero(); d];
    let mut ha = vec![T::zero(); d * d];
    for (th, thf) in thetas.iter().zip(&thetas_f) {
        for &x in xs.iter().step_by(5) {
            let xt = T::lit(x);
            let mut record = |a: f64, fd: f64| {
                let e = rel_err(a, fd);
                let ok = (a - fd).abs() <= tol * a.abs().max(fd.abs()) + 1e-9;
                if !ok {
                    failed = true;
                }
                worst.offer(x, None, thf, e);
            };
            // ∂x b
            let hx = step_for(x);
            let fd = (b(x + hx, th) - b(x - hx, th)) / (2.0 * hx);
            record(drift.dx_b(xt, th).as_f64(), fd);
            drift.grad_theta_b(xt, th, &mut ga);
            drift.grad_theta_dx_b(xt, th, &mut gp);
            let gdx: Vec<f64> = gp.iter().map(|v| v.as_f64()).collect();
            drift.hess_theta_b(xt, th, &mut ha);
            for i in 0..d {
                let hi = step_for(thf[i]);
                let mut tp = th.clone();
                let mut tm = th.clone();
                tp[i] = T::lit(thf[i] + hi);
                tm[i] = T::lit(thf[i] - hi);
                // ∇θ b
                let fd = (b(x, &tp) - b(x, &tm)) / (2.0 * hi);
                record(ga[i].as_f64(), fd);
                // ∇θ ∂x b
                let fd = (drift.dx_b(xt, &tp).as_f64() - drift.dx_b(xt, &tm).as_f64()) / (2.0 * hi);
                record(gdx[i], fd);
                // ∇²θ b, column i
                drift.grad_theta_b(xt, &tp, &mut gp);
                drift.grad_theta_b(xt, &tm, &mut gm);
                for r in 0..d {
                    let fd = (gp[r].as_f64() - gm[r].as_f64()) / (2.0 * hi);
                    record(ha[r * d + i].as_f64(), fd);
                }
            }
        }
    }
    checks.push(AssumptionCheck {
        assumption: "A1-derivatives".into(),
        status: if failed { CheckStatus::Fail } else { CheckStatus::Pass },
        worst: worst.point,
        detail: format!("central differences, relative tolerance {tol}"),
    });

    // A2: ∂x U = b
    let has_potential = drift.potential(T::zero(), &thetas[0]).is_some();
    if has_potential {
        let mut worst = Worst::new();
        let mut failed = false;
        for (th, thf) in thetas.iter().zip(&thetas_f) {
            for &x in xs.iter().step_by(5) {
                let hx = step_for(x);
                let u = |x: f64| drift.potential(T::lit(x), th).map(|v| v.as_f64()).unwrap_or(f64::NAN);
                let fd = (u(x + hx) - u(x - hx)) / (2.0 * hx);
                let a = b(x, th);
                if !((a - fd).abs() <= tol * a.abs().max(fd.abs()) + 1e-9) {
                    failed = true;
                }
                worst.offer(x, None, thf, rel_err(a, fd));
            }
        }
        checks.push(AssumptionCheck {
            assumption: "A2-potential".into(),
            status: if failed { CheckStatus::Fail } else { CheckStatus::Pass },
            worst: worst.point,
            detail: "central difference of U against b".into(),
        });
    } else {
        checks.push(AssumptionCheck {
            assumption: "A2-potential".into(),
            status: CheckStatus::Skipped,
            worst: None,
            detail: "drift supplies no potential".into(),
        });
    }

    for (name, detail) in [
        (
            "A4-identifiability",
            "needs stationary samples; see limits::info_matrix",
        ),
        ("A5-information", "needs stationary samples; see contrast::info_matrix"),
    ] {
        checks.push(AssumptionCheck {
            assumption: name.into(),
            status: CheckStatus::Deferred,
            worst: None,
            detail: detail.into(),
        });
    }

    ValidationReport {
        drift: drift.name().to_string(),
        checks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Expanding;
    impl Drift<f64> for Expanding {
        fn name(&self) -> &str {
            "expanding"
        }
        fn dim(&self) -> usize {
            1
        }
        fn b(&self, x: f64, t: &[f64]) -> f64 {
            t[0] * x
        }
        fn grad_theta_b(&self, x: f64, _t: &[f64], o: &mut [f64]) {
            o[0] = x;
        }
        fn dx_b(&self, _x: f64, t: &[f64]) -> f64 {
            t[0]
        }
        fn grad_theta_dx_b(&self, _x: f64, _t: &[f64], o: &mut [f64]) {
            o[0] = 1.0;
        }
        fn hess_theta_b(&self, _x: f64, _t: &[f64], o: &mut [f64]) {
            o[0] = 0.0;
        }
        fn dissipativity(&self, d: &ThetaDomain<f64>) -> f64 {
            d.lower[0]
        }
        fn growth_degree(&self) -> u32 {
            1
        }
        fn default_domain(&self) -> ThetaDomain<f64> {
            ThetaDomain::new(vec![0.1], vec![5.0]).unwrap()
        }
    }

    /// fOU with the θ-gradient scaled by 1.1.
    struct WrongGradient;
    impl Drift<f64> for WrongGradient {
        fn name(&self) -> &str {
            "wrong-gradient"
        }
        fn dim(&self) -> usize {
            1
        }
        fn b(&self, x: f64, t: &[f64]) -> f64 {
            FouDrift.b(x, t)
        }
        fn grad_theta_b(&self, x: f64, _t: &[f64], o: &mut [f64]) {
            o[0] = -1.1 * x;
        }
        fn dx_b(&self, x: f64, t: &[f64]) -> f64 {
            Drift::<f64>::dx_b(&FouDrift, x, t)
        }
        fn grad_theta_dx_b(&self, x: f64, t: &[f64], o: &mut [f64]) {
            Drift::<f64>::grad_theta_dx_b(&FouDrift, x, t, o)
        }
        fn hess_theta_b(&self, x: f64, t: &[f64], o: &mut [f64]) {
            Drift::<f64>::hess_theta_b(&FouDrift, x, t, o)
        }
        fn dissipativity(&self, d: &ThetaDomain<f64>) -> f64 {
            d.lower[0]
        }
        fn growth_degree(&self) -> u32 {
            1
        }
        fn default_domain(&self) -> ThetaDomain<f64> {
            ThetaDomain::new(vec![0.1], vec![5.0]).unwrap()
        }
    }

    /// Cubic drift claiming linear growth.
    struct UnderstatedGrowth;
    impl Drift<f64> for UnderstatedGrowth {
        fn name(&self) -> &str {
            "understated"
        }
        fn dim(&self) -> usize {
            2
        }
        fn b(&self, x: f64, t: &[f64]) -> f64 {
            CubicDrift.b(x, t)
        }
        fn grad_theta_b(&self, x: f64, t: &[f64], o: &mut [f64]) {
            CubicDrift.grad_theta_b(x, t, o)
        }
        fn dx_b(&self, x: f64, t: &[f64]) -> f64 {
            CubicDrift.dx_b(x, t)
        }
        fn grad_theta_dx_b(&self, x: f64, t: &[f64], o: &mut [f64]) {
            CubicDrift.grad_theta_dx_b(x, t, o)
        }
        fn hess_theta_b(&self, x: f64, t: &[f64], o: &mut [f64]) {
            CubicDrift.hess_theta_b(x, t, o)
        }
        fn dissipativity(&self, d: &ThetaDomain<f64>) -> f64 {
            d.lower[0]
        }
        fn growth_degree(&self) -> u32 {
            1
        }
        fn default_domain(&self) -> ThetaDomain<f64> {
            CubicDrift.default_domain()
        }
    }

    fn fou_domain() -> ThetaDomain<f64> {
        ThetaDomain::new(vec![0.1], vec![5.0]).unwrap()
    }

    #[test]
    fn fou_evaluators() {
        let d = FouDrift;
        assert_eq!(Drift::<f64>::b(&d, 2.0, &[1.0]), -2.0);
        assert_eq!(Drift::<f64>::grad_theta_b_vec(&d, 3.0, &[5.0]), vec![-3.0]);
        assert_eq!(Drift::<f64>::dx_b(&d, 3.0, &[5.0]), -5.0);
        assert_eq!(Drift::<f64>::potential(&d, 2.0, &[1.0]), Some(-2.0));
        assert_eq!(Drift::<f64>::dissipativity(&d, &fou_domain()), 0.1);
    }

    #[test]
    fn cubic_evaluators() {
        let d = CubicDrift;
        assert_eq!(Drift::<f64>::b(&d, 1.0, &[1.0, 1.0]), -2.0);
        assert_eq!(Drift::<f64>::grad_theta_b_vec(&d, 2.0, &[0.3, 7.0]), vec![-2.0, -8.0]);
    }

    #[test]
    fn fou_dissipativity_at_half() {
        // (−θx + θy)(x − y) = −θ(x − y)²
        let dom = ThetaDomain::new(vec![0.5], vec![0.5 + 1e-12]).unwrap();
        let r = validate_assumptions(&FouDrift, &dom, &ProbeConfig::default());
        assert_eq!(r.check("A1-dissipativity").unwrap().status, CheckStatus::Pass);
    }

    #[test]
    fn builtins_pass_static_checks() {
        let reg = DriftRegistry::<f64>::with_builtins();
        for name in reg.names() {
            let d = reg.get(&name).unwrap();
            let r = validate_assumptions(d.as_ref(), &d.default_domain(), &ProbeConfig::default());
            assert!(r.passed(), "{name}: {r:#?}");
            assert_eq!(r.check("A2-potential").unwrap().status, CheckStatus::Pass);
            assert_eq!(r.check("A4-identifiability").unwrap().status, CheckStatus::Deferred);
        }
        let r = validate_assumptions(&FouDrift, &fou_domain(), &ProbeConfig::default());
        assert!(r.passed());
    }

    #[test]
    fn expanding_drift_fails_dissipativity() {
        let r = validate_assumptions(&Expanding, &fou_domain(), &ProbeConfig::default());
        let c = r.check("A1-dissipativity").unwrap();
        assert_eq!(c.status, CheckStatus::Fail);
        let w = c.worst.as_ref().unwrap();
        assert_ne!(Some(w.x), w.y);
        assert_eq!(r.check("A2-potential").unwrap().status, CheckStatus::Skipped);
        assert!(!r.passed());
    }

    #[test]
    fn injected_gradient_fault_detected() {
        let r = validate_assumptions(&WrongGradient, &fou_domain(), &ProbeConfig::default());
        assert_eq!(r.check("A1-derivatives").unwrap().status, CheckStatus::Fail);
        assert_eq!(r.check("A1-dissipativity").unwrap().status, CheckStatus::Pass);
        let worst = r.check("A1-derivatives").unwrap().worst.clone().unwrap();
        assert!(worst.violation > 0.05);
    }

    #[test]
    fn understated_growth_detected() {
        let r = validate_assumptions(
            &UnderstatedGrowth,
            &CubicDrift.default_domain(),
            &ProbeConfig::default(),
        );
        assert_eq!(r.check("A1-growth").unwrap().status, CheckStatus::Fail);
    }

    #[test]
    fn registry_lookup() {
        let reg = DriftRegistry::<f64>::with_builtins();
        assert_eq!(reg.names(), vec!["cubic".to_string(), "fou".to_string()]);
        let err = reg.get("nope").err().unwrap().to_string();
        assert!(err.contains("cubic") && err.contains("fou"), "{err}");
        let mut reg = reg;
        reg.register("zero", Arc::new(ZeroDrift));
        assert!(reg.get("zero").is_ok());
    }

    #[test]
    fn domain_helpers() {
        assert!(ThetaDomain::new(vec![1.0], vec![1.0]).is_err());
        assert!(ThetaDomain::<f64>::new(vec![], vec![]).is_err());
        let d = ThetaDomain::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!(d.contains(&[0.5, 1.0]));
        assert!(!d.contains(&[0.0, 1.0]));
        let mut t = vec![-1.0, 3.0];
        d.project(&mut t);
        assert_eq!(t, vec![0.0, 2.0]);
        assert!(d.on_boundary(&t, 1e-9));
        let pts = d.quasi_random_points(8);
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0], vec![0.5, 2.0 / 3.0]);
        assert!(pts.iter().all(|p| d.contains(p)));
    }
}
