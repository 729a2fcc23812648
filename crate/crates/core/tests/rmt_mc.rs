use faer::Mat;
use wavechaos::rmt_mc::*;
use wavechaos::scattering_stats::{transmission_coefficient, Port};

fn small(beta: u8, name: &str, n_samples: usize, seed: u64) -> EnsembleConfig {
    let mut cfg = EnsembleConfig::new(beta, preset(name).unwrap(), n_samples, seed);
    cfg.n_dim = 120;
    cfg.calibration.pilot_samples = 4000;
    cfg
}

#[test]
fn kappa_branch_examples() {
    assert_eq!(kappa_from_transmission(1.0).unwrap(), 1.0);
    let k = kappa_from_transmission(0.89).unwrap();
    let direct = (2.0 - 0.89 - 2.0 * 0.11f64.sqrt()) / 0.89;
    assert!((k - direct).abs() < 1e-15);
    assert!((k - 0.5019).abs() < 1e-4);
    assert!((4.0 * k / (1.0 + k).powi(2) - 0.89).abs() < 1e-15);
    assert!(kappa_from_transmission(0.0).is_err());
    assert!(kappa_from_transmission(1.5).is_err());
}

#[test]
fn presets_and_gamma() {
    let a = preset("gamma5.39").unwrap();
    assert_eq!((a.t_a, a.t_b, a.m, a.t_c), (0.89, 0.89, 100, 0.0361));
    assert!((a.gamma() - 5.39).abs() < 1e-12);
    let b = preset("gamma27.18").unwrap();
    assert_eq!((b.t_a, b.t_b, b.m, b.t_c), (0.56, 0.56, 100, 0.261));
    assert!((b.gamma() - 27.22).abs() < 1e-12);
    let msg = preset("gamma1").unwrap_err().to_string();
    assert!(msg.contains("gamma5.39") && msg.contains("gamma27.18"), "{msg}");
}

#[test]
fn config_validation() {
    let good = EnsembleConfig::new(2, preset("gamma5.39").unwrap(), 10, 1);
    assert!(good.validate().is_ok());
    assert!(EnsembleConfig { n_dim: 49, ..good }.validate().is_err());
    assert!(EnsembleConfig { energy_window: 0.25, ..good }.validate().is_err());
    assert!(EnsembleConfig { beta: 4, ..good }.validate().is_err());
    // 102 channels do not fit into N = 100
    assert!(EnsembleConfig { n_dim: 100, ..good }.validate().is_err());
    assert!(coupling_vectors(&good.channels, 101, 1.0 / std::f64::consts::PI).is_err());
    assert!(ChannelModel::new(0.9, 0.9, 100, 1.0).is_err());
    let few = ChannelModel::new(0.89, 0.89, 10, 0.361).unwrap();
    assert!(EnsembleConfig { channels: few, ..good }.validate().is_err());
    let shifted = EnsembleConfig { channels: few, absorption: AbsorptionMode::UniformShift, ..good };
    assert!(shifted.validate().is_ok());
}

#[test]
fn calibration_reaches_antenna_target() {
    let cfg = small(2, "gamma5.39", 10_000, 3);
    let ens = Ensemble::new(cfg).unwrap();
    let cal = ens.calibration.as_ref().unwrap();
    assert!(cal.converged);
    for k in 0..3 {
        assert!((cal.measured_t[k] - cal.target_t[k]).abs() <= 0.01, "{cal:?}");
    }
    // fresh production draws, not the pilot
    let s = ens.samples().unwrap();
    for port in [Port::A, Port::B] {
        let t = transmission_coefficient(&s, port).unwrap();
        assert!((0.88..=0.90).contains(&t), "{port:?}: {t}");
    }
}

#[test]
fn full_s_is_subunitary() {
    for beta in [1, 2] {
        let cfg = small(beta, "gamma27.18", 0, 4);
        let ens = Ensemble::new(cfg).unwrap();
        for seed in 0..20 {
            let h = sample_hamiltonian(beta, cfg.n_dim, seed).unwrap();
            let s = s_matrix_full(&h, &ens.couplings, 0.01 * seed as f64, 0.0).unwrap();
            let sv = s.singular_values().unwrap();
            assert!(sv.iter().all(|&x| x <= 1.0 + 1e-10), "{:?}", sv.iter().cloned().fold(0.0, f64::max));
            if beta == 1 {
                let diff: Mat<faer::c64> = &s - s.transpose();
                assert!(diff.norm_max() < 1e-12);
            }
        }
    }
}

#[test]
fn goe_is_reciprocal_every_sample() {
    let ens = Ensemble::new(small(1, "gamma5.39", 2000, 5)).unwrap();
    for s in ens.samples().unwrap() {
        assert!((s.s_ab() - s.s_ba()).norm() < 1e-12);
    }
}

#[test]
fn gue_is_nonreciprocal() {
    let ens = Ensemble::new(small(2, "gamma5.39", 2000, 6)).unwrap();
    let s = ens.samples().unwrap();
    let broken = s.iter().filter(|x| (x.s_ab() - x.s_ba()).norm() > 0.01).count();
    assert!(broken as f64 > 0.9 * s.len() as f64, "{broken}");
}

#[test]
fn stream_reproducible_and_sliceable() {
    let cfg = small(2, "gamma27.18", 300, 7);
    let a = sample_ensemble(&cfg).unwrap();
    let b = sample_ensemble(&cfg).unwrap();
    assert_eq!(a, b);
    let ens = Ensemble::new(cfg).unwrap();
    assert_eq!(ens.samples_in(100..200).unwrap(), a[100..200].to_vec());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let c = pool.install(|| ens.samples().unwrap());
    assert_eq!(a, c);
    let other = sample_ensemble(&EnsembleConfig { seed: 8, ..cfg }).unwrap();
    assert_ne!(a[0].s, other[0].s);
    for (i, s) in a.iter().enumerate() {
        assert_eq!(s.tag.index, i as u64);
        assert!(s.coord.abs() <= cfg.e_max());
    }
}

#[test]
fn uniform_shift_mode_matches_channel_gamma() {
    let mut cfg = small(2, "gamma5.39", 0, 9);
    cfg.absorption = AbsorptionMode::UniformShift;
    let ens = Ensemble::new(cfg).unwrap();
    assert_eq!(ens.couplings.channel_count(), 2);
    // Γ = 2ε equals M·T_c spacings over 2π
    let delta = 1.0 / (cfg.n_dim as f64 / std::f64::consts::PI);
    let gamma_int = 2.0 * std::f64::consts::PI * 2.0 * ens.shift / delta;
    assert!((gamma_int - 3.61).abs() < 1e-12);
}

#[test]
fn spectral_scale() {
    let sc = SpectralScale::new(200, 5.39);
    assert_eq!(sc.rho0, 1.0 / std::f64::consts::PI);
    assert!((sc.mean_spacing * 200.0 * sc.rho0 - 1.0).abs() < 1e-15);
    assert!((sc.gamma_over_delta * 2.0 * std::f64::consts::PI - 5.39).abs() < 1e-15);
    assert!((semicircle(0.0) - 1.0 / std::f64::consts::PI).abs() < 1e-15);
    // ρ(0.1) within 0.2% of ρ(0)
    assert!((semicircle(0.1) * std::f64::consts::PI - 1.0).abs() < 2e-3);
}
