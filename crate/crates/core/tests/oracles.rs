//! Values frozen from independent computations (mpmath Hurwitz-zeta tails,
//! closed-form Gaussian moments) and Monte Carlo checks of small examples.

use approx::assert_relative_eq;
use fraclse_core::contrast::FouQuadratic;
use fraclse_core::*;

fn hurst(v: f64) -> Hurst64 {
    HurstIndex::new(v).unwrap()
}

#[test]
fn c_const_frozen_values() {
    // 2 + 4 Σ_{v≥1} ρ(v)², partial sum to 10⁵ plus mpmath Hurwitz-zeta tail
    let frozen = [
        (0.55, 2.0316528380272, 1e-10),
        (0.6, 2.1642616413656, 1e-10),
        (0.65, 2.5385039138686, 1e-10),
        (0.7, 3.8572596764485, 1e-9),
        (0.74, 15.041889662276, 1e-7),
    ];
    for (hv, expected, tol) in frozen {
        let c = c_const(hurst(hv), 1e-12).unwrap();
        assert_relative_eq!(c.value, expected, max_relative = tol);
    }
}

#[test]
fn c_const_brute_force_gap_matches_tail() {
    // A 10⁶-term brute-force sum misses exactly the tail the expansion supplies.
    let hu = hurst(0.6);
    let mut partial = 0.0;
    for v in (1..=1_000_000i64).rev() {
        let r = fgn_autocovariance(v, hu);
        partial += r * r;
    }
    let brute = 2.0 + 4.0 * partial;
    let c = c_const(hu, 1e-12).unwrap().value;
    let gap = c - brute;
    assert!(gap > 0.0);
    // leading tail term: 4 H²(2H−1)² Σ_{v>V} v^{4H−4} ≈ 4 H²(2H−1)² V^{4H−3}/(3−4H)
    let lead = 4.0 * 0.36 * 0.04 * 1e6f64.powf(-0.6) / 0.6;
    assert_relative_eq!(gap, lead, max_relative = 1e-2);
}

#[test]
fn zero_drift_contrast_is_centred() {
    // X = σB: E Q_n = 0
    let hu = hurst(0.7);
    let n = 64;
    let h = 0.1;
    let sigma = 1.3;
    let gen = CirculantFgn::new(n, hu).unwrap();
    let reps = 10_000;
    let mut qs = Vec::with_capacity(reps);
    for r in 0..reps {
        let fgn = gen.sample(h, rng::derive_seed(77, r as u64)).unwrap();
        let b = cumulate(&fgn);
        let values: Vec<f64> = b.iter().map(|x| sigma * x).collect();
        let path = ObservedPath {
            scheme: SamplingScheme::with_step(n, h, 1).unwrap(),
            values,
            driving_increments: None,
            sigma,
            theta_true: None,
            hurst: hu,
        };
        qs.push(qn(&path, &ZeroDrift, &[0.0], sigma, hu));
    }
    let mean = qs.iter().sum::<f64>() / reps as f64;
    let var = qs.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (reps - 1) as f64;
    let se = (var / reps as f64).sqrt();
    assert!(mean.abs() < 3.0 * se, "mean {mean}, se {se}");
}

#[test]
fn fou_quadratic_roots_are_estimator_candidates() {
    let hu = hurst(0.6);
    let scheme = SamplingScheme::new(2000, 1.0, 0.55, 4).unwrap();
    let sim = PathSimulator::with_burn_in(&FouDrift, &[1.0], 1.0, 0.0, scheme, hu, 20.0).unwrap();
    let path = sim.simulate(11).unwrap();
    let quad = FouQuadratic::from_path(&path, 1.0, hu);
    let roots = quad.roots();
    assert_eq!(roots.len(), 2);
    // Q(θ) has one root near −θ₀ and one near +θ₀, only the latter in Θ
    assert!(roots[0] < 0.0 && roots[1] > 0.1);
    let dom = ThetaDomain::new(vec![0.1], vec![5.0]).unwrap();
    let r = estimate_lse(&path, &FouDrift, 1.0, hu, &dom, &OptConfig::default()).unwrap();
    assert_relative_eq!(r.theta_hat[0], roots[1], epsilon = 1e-8);
}

#[test]
fn stationary_fou_second_moment() {
    // E X̄² = σ² θ^{−2H} H Γ(2H) for the stationary fOU process
    let hu = hurst(0.6);
    let theta = 1.0;
    let gamma_12 = 0.918_168_742_399_760_6; // Γ(1.2)
    let m2 = 0.6 * gamma_12;
    let scheme = SamplingScheme::with_step(400_000, 0.01, 1).unwrap();
    let sim = PathSimulator::with_burn_in(&FouDrift, &[theta], 1.0, 0.0, scheme, hu, 20.0).unwrap();
    let path = sim.simulate(5).unwrap();
    let emp = path.values.iter().map(|x| x * x).sum::<f64>() / path.values.len() as f64;
    // Euler at δ = 0.01 and a horizon of 4000 time units: a few percent
    assert_relative_eq!(emp, m2, max_relative = 0.05);
}

#[test]
fn information_matches_gaussian_fourth_moment() {
    let hu = hurst(0.6);
    let scheme = SamplingScheme::with_step(400_000, 0.01, 1).unwrap();
    let sim = PathSimulator::with_burn_in(&FouDrift, &[1.0], 1.0, 0.0, scheme, hu, 20.0).unwrap();
    let path = sim.simulate(6).unwrap();
    let est = info_matrix(&path.values, &FouDrift, &[1.0]).unwrap();
    let v = path.values.iter().map(|x| x * x).sum::<f64>() / path.values.len() as f64;
    assert_relative_eq!(est.matrix[0], 3.0 * v * v, max_relative = 0.1);
    assert!(est.positive_definite);
}

#[test]
fn median_error_at_ten_thousand() {
    // θ₀ = 1, σ = 1, H = 0.6, α = 0.55, n = 10⁴, 200 replicates: median |θ_n − θ₀| < 0.1
    let hu = hurst(0.6);
    let scheme = SamplingScheme::new(10_000, 1.0, 0.55, 8).unwrap();
    let sim = PathSimulator::with_burn_in(&FouDrift, &[1.0], 1.0, 0.0, scheme, hu, 20.0).unwrap();
    let dom = ThetaDomain::new(vec![0.1], vec![5.0]).unwrap();
    let mut errs: Vec<f64> = (0..200u64)
        .map(|r| {
            let path = sim.simulate(rng::derive_seed(2024, r)).unwrap();
            let est = estimate_lse(&path, &FouDrift, 1.0, hu, &dom, &OptConfig::default()).unwrap();
            (est.theta_hat[0] - 1.0).abs()
        })
        .collect();
    errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = 0.5 * (errs[99] + errs[100]);
    assert!(median < 0.1, "median |θ_n − θ₀| = {median}");
}

#[test]
fn cubic_contrast_vanishes_along_a_curve() {
    // one scalar equation in two unknowns: distinct starts reach distinct roots
    let hu = hurst(0.6);
    let scheme = SamplingScheme::new(2000, 1.0, 0.55, 4).unwrap();
    let sim = PathSimulator::with_burn_in(&CubicDrift, &[1.0, 0.5], 1.0, 0.0, scheme, hu, 5.0).unwrap();
    let path = sim.simulate(3).unwrap();
    let dom = ThetaDomain::new(vec![0.1, 0.01], vec![5.0, 5.0]).unwrap();
    let r = estimate_lse(&path, &CubicDrift, 1.0, hu, &dom, &OptConfig::default()).unwrap();
    let roots: Vec<&Vec<f64>> = r
        .candidates
        .iter()
        .filter(|c| c.abs_qn < 1e-5)
        .map(|c| &c.theta)
        .collect();
    assert!(roots.len() >= 2);
    let spread = roots.iter().map(|t| t[0]).fold(f64::NEG_INFINITY, f64::max)
        - roots.iter().map(|t| t[0]).fold(f64::INFINITY, f64::min);
    assert!(spread > 0.5, "roots {roots:?}");
}
