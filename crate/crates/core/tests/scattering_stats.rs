use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use wavechaos::rmt_mc::{preset, Ensemble, EnsembleConfig};
use wavechaos::scattering_stats::*;
use wavechaos::theory_density::MarginalCurve;
use wavechaos::TheoryParams64;

fn tp(s: Mat2<f64>, i: u64) -> TwoPort<f64> {
    TwoPort::new(s, 0.0, SampleTag { source: Source::Measured, realization: i, index: i })
}

fn random_unitary(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    // e^{iφ} [[a, b], [−b̄, ā]] with |a|² + |b|² = 1
    let t: f64 = rng.gen::<f64>() * PI / 2.0;
    let [pa, pb, phi]: [f64; 3] = std::array::from_fn(|_| rng.gen::<f64>() * 2.0 * PI);
    let a = C::from_polar(t.cos(), pa);
    let b = C::from_polar(t.sin(), pb);
    let g = C::from_polar(1.0, phi);
    [[g * a, g * b], [-g * b.conj(), g * a.conj()]]
}

fn random_subunitary(rng: &mut ChaCha8Rng) -> Mat2<f64> {
    let u = random_unitary(rng);
    let v = random_unitary(rng);
    let mut d = identity::<f64>();
    d[0][0] = C::new(rng.gen(), 0.0);
    d[1][1] = C::new(rng.gen(), 0.0);
    mul(&mul(&u, &d), &v)
}

fn mul(a: &Mat2<f64>, b: &Mat2<f64>) -> Mat2<f64> {
    let mut out = [[C::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn max_diff(a: &Mat2<f64>, b: &Mat2<f64>) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            m = m.max((a[i][j] - b[i][j]).norm());
        }
    }
    m
}

#[test]
fn k_roundtrip_on_random_subunitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let s = tp(random_subunitary(&mut rng), i);
        assert!(spectral_norm(&s.s) <= 1.0 + 1e-12);
        let k = k_from_s(&s).unwrap();
        let back = k_from_s(&s_from_k(&k).unwrap()).unwrap();
        worst = worst.max(max_diff(&back.k, &k.k));
        worst = worst.max(max_diff(&s_from_k(&k).unwrap().s, &s.s));
    }
    assert!(worst < 1e-12, "{worst}");
}

#[test]
fn unitary_s_gives_hermitian_k() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for i in 0..1000 {
        let s = tp(random_unitary(&mut rng), i);
        assert!(s.unitarity_defect() < 1e-13);
        let k = k_from_s(&s).unwrap();
        let norm = spectral_norm(&k.k);
        let defect = k.hermiticity_defect();
        // K diverges as an eigenvalue of S nears −1; the forward error grows like ε‖K‖²
        assert!(defect <= 4.0 * f64::EPSILON * (1.0 + norm).powi(2), "{defect} at ‖K‖={norm}");
        if norm <= 1e3 {
            assert!(defect < 1e-10, "{defect} at ‖K‖={norm}");
        }
    }
}

#[test]
fn transmission_examples() {
    let id = tp(identity(), 0);
    assert_eq!(transmission_coefficient(&vec![id; 100], Port::A).unwrap(), 0.0);
    assert_eq!(transmission_from_mean(C::new(0.0, 0.0)), 1.0);
    assert!((transmission_from_mean(C::new(0.11f64.sqrt(), 0.0)) - 0.89).abs() < 1e-15);
    assert!(transmission_coefficient(&[], Port::B).is_err());
    assert!((gamma_from_channels(0.56, 0.56, 100, 0.261).unwrap() - 27.22).abs() < 1e-12);
    assert_eq!(gamma_from_channels(0.0, 0.0, 100, 0.0).unwrap(), 0.0);
    assert!(solve_tc(500.0, 0.5, 0.5, 100).is_err());
}

#[test]
fn two_sample_ks_detects_shift() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let a: Vec<f64> = (0..20_000).map(|_| rng.sample(StandardNormal)).collect();
    let b: Vec<f64> = (0..20_000).map(|_| rng.sample(StandardNormal)).collect();
    let c: Vec<f64> = b.iter().map(|x| x + 0.1).collect();
    assert!(ks_two_sample(&a, &b).unwrap() < 0.02);
    assert!(ks_two_sample(&a, &c).unwrap() > 0.03);
}

#[test]
fn theory_draws_fit_back_with_decomposition() {
    let gamma = 5.39;
    let curve = MarginalCurve::new(TheoryParams64::from_gamma(gamma).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let re: Vec<f64> = (0..20_000).map(|_| curve.quantile(rng.gen())).collect();
    let im: Vec<f64> = (0..20_000).map(|_| curve.quantile(rng.gen())).collect();
    let cfg = FitConfig {
        channels: Some(ChannelHint { t_a: 0.89, t_b: 0.89, m: 100 }),
        ..FitConfig::default()
    };
    let fit = fit_gamma(FitInput { re: &re, im: &im, groups: None }, &cfg).unwrap();
    assert!((fit.gamma_hat - gamma).abs() < 0.3, "{}", fit.gamma_hat);
    let d = fit.decomposition.unwrap();
    let implied = d.t_a + d.t_b + d.m as f64 * d.t_c;
    assert!((implied - fit.gamma_hat).abs() <= 1e-12);
    assert!(fit.stderr.unwrap() > 0.0);
}

#[test]
fn binned_fit_uses_histogram() {
    let gamma = 27.18;
    let curve = MarginalCurve::new(TheoryParams64::from_gamma(gamma).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let v: Vec<f64> = (0..40_000).map(|_| curve.quantile(rng.gen())).collect();
    let est = estimate_distribution(&v, &EstimatorConfig::default()).unwrap();
    let fit = fit_gamma_binned(&est, &FitConfig::default()).unwrap();
    assert_eq!(fit.objective_kind, Objective::Ise);
    assert!((fit.gamma_hat - gamma).abs() < 0.95, "{}", fit.gamma_hat);
}

fn small(beta: u8, name: &str, n: usize, seed: u64) -> Vec<TwoPort<f64>> {
    let mut cfg = EnsembleConfig::new(beta, preset(name).unwrap(), n, seed);
    cfg.n_dim = 120;
    cfg.calibration.pilot_samples = 2000;
    cfg.calibration.tolerance = 0.02;
    Ensemble::new(cfg).unwrap().samples().unwrap()
}

#[test]
fn goe_enhancement_exceeds_gue() {
    for name in ["gamma5.39", "gamma27.18"] {
        let w1 = enhancement_factor(&small(1, name, 4000, 6), Bootstrap::default()).unwrap();
        let w2 = enhancement_factor(&small(2, name, 4000, 6), Bootstrap::default()).unwrap();
        assert!(w1.w > w2.w, "{name}: {} vs {}", w1.w, w2.w);
        assert!(w1.stderr > 0.0 && w2.stderr > 0.0);
        assert_eq!(w1.realizations, 4000);
    }
}

#[test]
fn gue_ensemble_re_im_parts_agree() {
    let s = small(2, "gamma5.39", 20_000, 7);
    let (re, im) = s_ab_parts(&s);
    assert!(ks_two_sample(&re, &im).unwrap() < 0.02);
    let k = k_samples(&s, KMode::Raw).unwrap();
    let (re, im) = k_ab_parts(&k);
    assert!(ks_two_sample(&re, &im).unwrap() < 0.02);
    let report = direct_process_check(&s).unwrap();
    assert!(!report.flagged);
    assert!(report.mean_abs_s_ab < 0.02, "{report:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn estimates_are_normalized(seed in any::<u64>(), n in 100usize..3000, kernel in any::<bool>(), spread in 0.01f64..100.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v: Vec<f64> = (0..n).map(|_| spread * rng.gen::<f64>().powi(3)).collect();
        let cfg = EstimatorConfig {
            kind: if kernel { EstimatorKind::Kernel } else { EstimatorKind::Histogram },
            ..EstimatorConfig::default()
        };
        let est = estimate_distribution(&v, &cfg).unwrap();
        prop_assert!((est.total_mass() - 1.0).abs() <= 1e-12);
        prop_assert!(est.densities.iter().all(|&d| d >= 0.0));
        prop_assert_eq!(est.samples, n);
    }

    #[test]
    fn ks_in_unit_interval(seed in any::<u64>(), n in 1usize..500, m in 1usize..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<f64> = (0..n).map(|_| rng.gen()).collect();
        let b: Vec<f64> = (0..m).map(|_| rng.gen::<f64>() * 2.0).collect();
        let d = ks_two_sample(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        let d = ks_statistic(&a, |x| x.clamp(0.0, 1.0)).unwrap();
        prop_assert!((0.0..=1.0).contains(&d));
        prop_assert_eq!(ks_two_sample(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn moments_merge_is_order_free(seed in any::<u64>(), split in 1usize..999) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s: Vec<_> = (0..1000).map(|i| tp(random_subunitary(&mut rng), i)).collect();
        let whole = s_moments(&s);
        let parts = s_moments(&s[..split]).merge(&s_moments(&s[split..]));
        for k in 0..4 {
            prop_assert!((whole.mean(k) - parts.mean(k)).norm() <= 1e-15);
            prop_assert!((whole.variance(k) - parts.variance(k)).abs() <= 1e-15);
        }
    }
}

