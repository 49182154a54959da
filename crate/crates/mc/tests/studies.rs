use fraclse_core::contrast::OptConfig;
use fraclse_core::rng::{fill_standard_normal, stream};
use fraclse_core::{estimate_lse, PathSimulator, VarianceConvention};
use fraclse_mc::output::write_records_csv;
use fraclse_mc::study::InfoReading;
use fraclse_mc::*;

fn config(kind: StudyKind) -> StudyConfig {
    StudyConfig {
        study: kind,
        drift: "fou".into(),
        theta0: vec![1.0],
        sigma: 1.0,
        hurst: 0.6,
        kappa: 1.0,
        alpha: 0.55,
        n_list: vec![500, 1000],
        replicates: 24,
        master_seed: 20240601,
        substeps: 4,
        burn_in: 5.0,
        x0: 0.0,
        convention: VarianceConvention::Variance,
        threads: Some(1),
        aux_steps: 50_000,
        aux_dt: 0.01,
        aux_burn_in: 20.0,
        shuffle_noise: false,
        domain: None,
        optimizer: OptConfig::default(),
    }
}

fn csv_bytes(r: &StudyResult) -> Vec<u8> {
    let mut buf = Vec::new();
    write_records_csv(r, &mut buf).unwrap();
    buf
}

#[test]
fn records_independent_of_thread_count() {
    let mut c = config(StudyKind::Consistency);
    let one = run_consistency_study(&c).unwrap();
    c.threads = Some(4);
    let four = run_consistency_study(&c).unwrap();
    assert_eq!(one.records, four.records);
    assert_eq!(csv_bytes(&one), csv_bytes(&four));
    assert_eq!(one.records.len(), 2 * 24);
}

#[test]
fn single_replicate_reproduces_standalone() {
    let c = config(StudyKind::Consistency);
    let result = run_consistency_study(&c).unwrap();
    let rec = result.records.iter().find(|r| r.n == 1000 && r.replicate == 7).unwrap();
    assert_eq!(rec.seed, replicate_seed(c.master_seed, 1000, 7));
    let resolved = c.resolve().unwrap();
    let sim = PathSimulator::with_burn_in(
        &*resolved.drift,
        &c.theta0,
        c.sigma,
        c.x0,
        c.scheme(1000).unwrap(),
        resolved.hurst,
        c.burn_in,
    )
    .unwrap();
    let path = sim.simulate(rec.seed).unwrap();
    let est = estimate_lse(
        &path,
        &*resolved.drift,
        c.sigma,
        resolved.hurst,
        &resolved.domain,
        &c.optimizer,
    )
    .unwrap();
    assert_eq!(est.theta_hat, rec.theta_hat);
}

#[test]
fn aggregates_ignore_replicate_order() {
    let c = config(StudyKind::Consistency);
    let result = run_consistency_study(&c).unwrap();
    let mut errs: Vec<f64> = result.records_for(1000).map(|r| (r.theta_hat[0] - 1.0).abs()).collect();
    let forward = stats::median(&errs);
    errs.reverse();
    errs.rotate_left(5);
    assert_eq!(stats::median(&errs), forward);
    assert_eq!(result.summary(1000).unwrap().median_abs_error[0], forward);
}

#[test]
fn noiseless_paths_identify_theta() {
    let mut c = config(StudyKind::Consistency);
    c.sigma = 0.0;
    c.x0 = 1.0;
    c.burn_in = 0.0;
    c.substeps = 1;
    c.replicates = 3;
    let r = run_consistency_study(&c).unwrap();
    for rec in &r.records {
        assert!((rec.theta_hat[0] - 1.0).abs() < 1e-6, "{:?}", rec.theta_hat);
    }
}

// Q_n vanishes on a curve in the (θ₁, θ₂) box and ties go to the smallest θ₁,
// so this checks the literal decrease only, not convergence to θ₀.
#[test]
fn cubic_medians_decrease() {
    let mut c = config(StudyKind::Consistency);
    c.drift = "cubic".into();
    c.theta0 = vec![1.0, 0.5];
    c.n_list = vec![1000, 10_000];
    c.replicates = 40;
    let r = run_consistency_study(&c).unwrap();
    let (a, b) = (&r.per_n[0].median_abs_error, &r.per_n[1].median_abs_error);
    eprintln!("cubic medians {a:?} -> {b:?}");
    assert!(b[0] < a[0] && b[1] < a[1], "medians {a:?} -> {b:?}");
}

#[test]
fn ks_self_test_calibrated() {
    let meta = 200;
    let mut passes = 0;
    for m in 0..meta {
        let mut rng = stream(9000 + m);
        let mut x = vec![0.0f64; 10_000];
        fill_standard_normal(&mut rng, &mut x);
        let x: Vec<f64> = x.iter().map(|v| 0.5 + 2.0 * v).collect();
        if ks_test(&x, 0.5, 4.0).unwrap().p_value > 0.01 {
            passes += 1;
        }
    }
    assert!(passes as f64 >= 0.95 * meta as f64, "{passes}/{meta}");
}

#[test]
fn shuffled_noise_is_rejected() {
    let mut c = config(StudyKind::Normality);
    c.n_list = vec![5000];
    c.replicates = 60;
    c.shuffle_noise = true;
    let r = run_normality_study(&c).unwrap();
    for conv in VarianceConvention::ALL {
        assert!(
            !r.normality_passes(conv, Some(InfoReading::SecondMoment), 0.01),
            "{conv:?} accepted a shuffled-noise sample"
        );
    }
}

#[test]
fn normality_reports_both_conventions_at_three_quarters() {
    let mut c = config(StudyKind::Normality);
    c.hurst = 0.75;
    c.n_list = vec![5000];
    c.replicates = 40;
    let r = run_normality_study(&c).unwrap();
    for conv in VarianceConvention::ALL {
        assert!(r.normality.iter().any(|t| t.convention == conv));
    }
    let lit = r
        .normality
        .iter()
        .find(|t| t.convention == VarianceConvention::Literal)
        .unwrap();
    let var = r
        .normality
        .iter()
        .find(|t| t.convention == VarianceConvention::Variance)
        .unwrap();
    // v = 9/16 < 1 so the squared reading gives the smaller target
    assert!(lit.target_variance < var.target_variance);
}

#[test]
fn normality_rejects_hermite_regime() {
    let mut c = config(StudyKind::Normality);
    c.hurst = 0.85;
    assert!(matches!(run_normality_study(&c), Err(McError::Regime(_))));
}

#[test]
fn hermite_regime_variance_stabilises() {
    let mut c = config(StudyKind::Hermite);
    c.hurst = 0.85;
    c.n_list = vec![20_000, 40_000];
    c.replicates = 200;
    c.aux_steps = 200_000;
    let r = run_hermite_regime_study(&c).unwrap();
    let ratio = r.variance_ratios[0].ratio;
    assert!((0.7..=1.4).contains(&ratio), "variance ratio {ratio}");
    // ζ must load on the noise's own quadratic variation; the sign is reported
    for d in &r.hermite {
        let corr = d.correlation_with_noise.unwrap();
        assert!(corr.abs() > 0.3, "n = {}: correlation {corr}", d.n);
        eprintln!(
            "n = {}: corr {corr:.3}, coefficient {:?}, sign agrees {:?}",
            d.n, d.coefficient, d.sign_agrees
        );
    }
}

#[test]
fn pure_fgn_variation_stabilises() {
    let mut c = config(StudyKind::HermiteFgn);
    c.hurst = 0.85;
    c.n_list = vec![4096, 8192];
    c.replicates = 200;
    let r = run_hermite_fgn_study(&c).unwrap();
    let ratio = r.variance_ratios[0].ratio;
    assert!((0.8..=1.25).contains(&ratio), "variance ratio {ratio}");
    assert!(r.normality.is_empty());
    assert!(r.hermite.iter().all(|h| h.skewness > 0.0));
}

#[test]
fn pure_fgn_gaussian_regime_is_standard_normal() {
    let mut c = config(StudyKind::HermiteFgn);
    c.hurst = 0.5 + 1e-9;
    c.n_list = vec![2048];
    c.replicates = 300;
    let r = run_hermite_fgn_study(&c).unwrap();
    let t = &r.normality[0];
    assert!(t.ks.p_value > 0.01, "{t:?}");
    assert!((0.8..1.2).contains(&t.empirical_variance));
}

#[test]
fn weighted_sum_of_constant_is_centred() {
    let mut c = config(StudyKind::Ergodic);
    c.n_list = vec![2000];
    c.replicates = 100;
    let resolved = c.resolve().unwrap();
    let sim = PathSimulator::with_burn_in(
        &*resolved.drift,
        &c.theta0,
        c.sigma,
        c.x0,
        c.scheme(2000).unwrap(),
        resolved.hurst,
        c.burn_in,
    )
    .unwrap();
    let sums: Vec<f64> = (0..100)
        .map(|r| {
            let p = sim.simulate(replicate_seed(c.master_seed, 2000, r)).unwrap();
            fraclse_core::weighted_increment_sum(&p, |_, _| 1.0, &c.theta0).unwrap()
        })
        .collect();
    let se = (stats::variance(&sums) / sums.len() as f64).sqrt();
    assert!(stats::mean(&sums).abs() < 3.0 * se);
}

#[test]
fn ergodic_study_reports_moments() {
    let mut c = config(StudyKind::Ergodic);
    c.n_list = vec![2000];
    c.replicates = 10;
    let r = run_ergodic_study(&c).unwrap();
    let s = &r.per_n[0];
    assert_eq!(s.mean_weighted_sum.len(), 1);
    // for b = −θx and ∇θb = −x: b ∇θb = θ x²
    assert!((s.mean_drift_moment[0] - s.mean_second_moment.unwrap()).abs() < 1e-12);
}

#[test]
fn outputs_are_written() {
    let c = config(StudyKind::Normality);
    let mut c = c;
    c.replicates = 24;
    c.n_list = vec![500];
    let r = run_normality_study(&c).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let paths = output::write_study(&r, dir.path()).unwrap();
    let names: Vec<String> = paths
        .iter()
        .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
        .collect();
    assert_eq!(
        names,
        [
            "records.csv",
            "median_error.csv",
            "normality.csv",
            "ecdf.csv",
            "result.json"
        ]
    );
    let json: serde_json::Value = serde_json::from_reader(std::fs::File::open(&paths[4]).unwrap()).unwrap();
    assert_eq!(json["records"].as_array().unwrap().len(), 24);
}
