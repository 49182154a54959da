use fraclse_core::contrast::{classical_ls, FouQuadratic};
use fraclse_core::limits::{ergodic_average, weighted_increment_sum};
use fraclse_core::*;
use proptest::prelude::*;

fn hurst(v: f64) -> Hurst64 {
    HurstIndex::new(v).unwrap()
}

fn path_from(values: Vec<f64>, db: Option<Vec<f64>>, h: f64, hv: f64) -> ObservedPath64 {
    ObservedPath {
        scheme: SamplingScheme::with_step(values.len() - 1, h, 1).unwrap(),
        values,
        driving_increments: db,
        sigma: 1.0,
        theta_true: None,
        hurst: hurst(hv),
    }
}

fn arb_path() -> impl Strategy<Value = ObservedPath64> {
    (prop::collection::vec(-3.0f64..3.0, 2..40), 0.001f64..0.5, 0.51f64..0.99).prop_map(|(v, h, hv)| {
        let db: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
        path_from(v, Some(db), h, hv)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qn_is_order_free(path in arb_path(), theta in 0.1f64..5.0, sigma in 0.0f64..2.0, seed in any::<u64>()) {
        let hv = path.hurst;
        let q = qn(&path, &FouDrift, &[theta], sigma, hv);
        let h = path.h();
        let c = sigma * sigma * h.powf(2.0 * hv.value());
        let mut terms: Vec<f64> = path.values.windows(2)
            .map(|w| (w[1] - w[0] + h * theta * w[0]).powi(2) - c)
            .collect();
        let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
        use rand::{seq::SliceRandom, SeedableRng};
        terms.shuffle(&mut rng);
        let shuffled = terms.iter().sum::<f64>() / (path.n() as f64 * h * h);
        prop_assert!((q - shuffled).abs() <= 1e-10 * (1.0 + q.abs()));
    }

    #[test]
    fn contrast_derivative_is_minus_two_grad(path in arb_path(), theta in 0.2f64..4.5, sigma in 0.0f64..2.0) {
        let hv = path.hurst;
        let eps = 1e-5;
        let fd = (qn(&path, &FouDrift, &[theta + eps], sigma, hv) - qn(&path, &FouDrift, &[theta - eps], sigma, hv)) / (2.0 * eps);
        let g = grad_qn(&path, &FouDrift, &[theta])[0];
        prop_assert!((fd + 2.0 * g).abs() <= 1e-6 * (1.0 + fd.abs()), "fd {fd} grad {g}");
    }

    #[test]
    fn cubic_contrast_derivative(path in arb_path(), t1 in 0.2f64..4.0, t2 in 0.1f64..4.0) {
        let hv = path.hurst;
        let theta = [t1, t2];
        let g = grad_qn(&path, &CubicDrift, &theta);
        for i in 0..2 {
            let eps = 1e-6;
            let mut up = theta;
            let mut dn = theta;
            up[i] += eps;
            dn[i] -= eps;
            let fd = (qn(&path, &CubicDrift, &up, 1.0, hv) - qn(&path, &CubicDrift, &dn, 1.0, hv)) / (2.0 * eps);
            prop_assert!((fd + 2.0 * g[i]).abs() <= 1e-5 * (1.0 + fd.abs()), "component {i}: fd {fd} grad {}", g[i]);
        }
    }

    #[test]
    fn ergodic_average_shifts_by_constant(path in arb_path(), c in -10.0f64..10.0) {
        let a = ergodic_average(&path, |x, _| x * x, &[1.0]);
        let b = ergodic_average(&path, |x, _| x * x + c, &[1.0]);
        prop_assert!((b - a - c).abs() <= 1e-12 * (1.0 + a.abs() + c.abs()));
    }

    #[test]
    fn weighted_sum_is_linear(path in arb_path(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let f = |x: f64, _: &[f64]| x;
        let g = |x: f64, _: &[f64]| x.sin();
        let lhs = weighted_increment_sum(&path, |x, t| a * f(x, t) + b * g(x, t), &[1.0]).unwrap();
        let rhs = a * weighted_increment_sum(&path, f, &[1.0]).unwrap() + b * weighted_increment_sum(&path, g, &[1.0]).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + lhs.abs()));
    }

    #[test]
    fn rate_is_positive_and_monotone(n in 2usize..1_000_000, h in 1e-4f64..1.0, hv in 0.51f64..0.99) {
        let hu = hurst(hv);
        let t = rate_tau(n, h, hu).unwrap();
        prop_assert!(t > 0.0 && t.is_finite());
        // fixed h: larger n never decreases the rate (above n = e for the log regime)
        let t2 = rate_tau(n + 1, h, hu).unwrap();
        prop_assert!(t2 > t * (1.0 - 1e-12) || n < 3);
        prop_assert!((t2 - t).abs() <= t);
    }

    #[test]
    fn fou_estimate_matches_closed_form(seed in 0u64..10_000, theta0 in 0.3f64..3.0, hv in 0.55f64..0.9) {
        let hu = hurst(hv);
        let scheme = SamplingScheme::new(400, 1.0, 0.5, 2).unwrap();
        let path = simulate_path(&FouDrift, &[theta0], 1.0, 0.5, &scheme, hu, seed).unwrap();
        let dom = ThetaDomain::new(vec![0.1], vec![5.0]).unwrap();
        let r = estimate_lse(&path, &FouDrift, 1.0, hu, &dom, &OptConfig::default()).unwrap();
        let quad = FouQuadratic::from_path(&path, 1.0, hu);
        let exact = quad.argmin_abs(0.1, 5.0);
        prop_assert!((r.theta_hat[0] - exact).abs() <= 1e-8, "{} vs {}", r.theta_hat[0], exact);
        prop_assert!(dom.lower[0] <= r.theta_hat[0] && r.theta_hat[0] <= dom.upper[0]);
        for c in &r.candidates {
            prop_assert!(r.abs_qn_at_opt <= c.abs_qn + OptConfig::default().q2_tol.sqrt());
        }
    }

    #[test]
    fn cubic_estimate_stays_in_box(seed in 0u64..1000) {
        let hu = hurst(0.6);
        let scheme = SamplingScheme::new(200, 1.0, 0.5, 2).unwrap();
        let path = simulate_path(&CubicDrift, &[1.0, 0.5], 1.0, 0.0, &scheme, hu, seed).unwrap();
        let dom = ThetaDomain::new(vec![0.1, 0.01], vec![5.0, 5.0]).unwrap();
        let r = estimate_lse(&path, &CubicDrift, 1.0, hu, &dom, &OptConfig::default()).unwrap();
        for i in 0..2 {
            prop_assert!(dom.lower[i] <= r.theta_hat[i] && r.theta_hat[i] <= dom.upper[i]);
        }
        prop_assert!(r.abs_qn_at_opt.is_finite());
    }

    #[test]
    fn classical_ls_offsets_contrast(path in arb_path(), theta in 0.1f64..5.0, sigma in 0.0f64..2.0) {
        // Σ r² = n h² Q_n + n σ² h^{2H}
        let hv = path.hurst;
        let n = path.n() as f64;
        let h = path.h();
        let lhs = classical_ls(&path, &FouDrift, &[theta]);
        let rhs = n * h * h * qn(&path, &FouDrift, &[theta], sigma, hv) + n * sigma * sigma * h.powf(2.0 * hv.value());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + lhs.abs()));
    }

    #[test]
    fn fbm_covariance_symmetric(s in 0.0f64..10.0, t in 0.0f64..10.0, hv in 0.51f64..0.99) {
        let hu = hurst(hv);
        let a = fbm_covariance(s, t, hu).unwrap();
        prop_assert!((a - fbm_covariance(t, s, hu).unwrap()).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!(a * a <= fbm_covariance(s, s, hu).unwrap() * fbm_covariance(t, t, hu).unwrap() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn circulant_is_reproducible(n in 1usize..300, hv in 0.51f64..0.99, seed in any::<u64>()) {
        let a = generate_fgn_circulant(n, hurst(hv), 1.0, seed).unwrap();
        let b = generate_fgn_circulant(n, hurst(hv), 1.0, seed).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn projection_lands_in_closure(x in prop::collection::vec(-100.0f64..100.0, 2)) {
        let dom = ThetaDomain::new(vec![0.1, 0.01], vec![5.0, 5.0]).unwrap();
        let mut p = x.clone();
        dom.project(&mut p);
        for ((lo, hi), v) in dom.lower.iter().zip(&dom.upper).zip(&p) {
            prop_assert!(lo <= v && v <= hi);
        }
    }
}

#[test]
fn brute_force_partial_sums_nondecreasing() {
    for hv in [0.55, 0.6, 0.7, 0.74] {
        let hu = hurst(hv);
        let mut s = 2.0;
        let mut prev = s;
        for v in 1..5000i64 {
            let r = fgn_autocovariance(v, hu);
            s += 4.0 * r * r;
            assert!(s >= prev);
            prev = s;
        }
        assert!(s < c_const(hu, 1e-12).unwrap().value);
    }
}
