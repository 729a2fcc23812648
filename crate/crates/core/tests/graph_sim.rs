use std::sync::Arc;

use num_complex::Complex64;
use proptest::prelude::*;
use wavechaos::graph_sim::*;
use wavechaos::scattering_stats::{direct_process_check, spectral_norm, TwoPort};

fn compiled(spec: NetworkSpec) -> Arc<CompiledNetwork> {
    Arc::new(CompiledNetwork::new(spec).unwrap())
}

fn lossless(spec: NetworkSpec) -> NetworkSpec {
    let mut s = spec.with_uniform_loss(0.0);
    for e in &mut s.edges {
        e.lumped_attenuation = 0.0;
    }
    s
}

fn window() -> (f64, f64) {
    (ghz_to_wavenumber(3.0), ghz_to_wavenumber(7.0))
}

fn asym(s: &TwoPort<f64>) -> f64 {
    (s.s[0][1] - s.s[1][0]).norm()
}

fn random_ks(n: usize) -> Vec<f64> {
    // fixed pseudo-random points in the measurement window
    let (lo, hi) = window();
    (0..n)
        .map(|i| lo + (hi - lo) * ((i as f64 * 0.618_033_988_75).fract()))
        .collect()
}

#[test]
fn lossless_reciprocal_graph_is_unitary_and_symmetric() {
    for spec in [nine_vertex(), hexagon()] {
        let r = Realization::base_of(compiled(lossless(spec).without_circulators()));
        for k in random_ks(100) {
            let s = two_port_s(&r, k).unwrap();
            assert!(s.unitarity_defect() < 1e-10);
            assert!(asym(&s) < 1e-10);
        }
    }
}

#[test]
fn circulators_break_reciprocity() {
    let spec = lossless(nine_vertex());
    let with = Realization::base_of(compiled(spec.clone()));
    let without = Realization::base_of(compiled(spec.without_circulators()));
    let ks = random_ks(100);
    let mut max_with: f64 = 0.0;
    let mut max_without: f64 = 0.0;
    for &k in &ks {
        let s = two_port_s(&with, k).unwrap();
        assert!(s.unitarity_defect() < 1e-10);
        max_with = max_with.max(asym(&s));
        max_without = max_without.max(asym(&two_port_s(&without, k).unwrap()));
    }
    assert!(max_with > 0.1, "{max_with}");
    assert!(max_without < 1e-10, "{max_without}");
}

#[test]
fn ensemble_median_asymmetry() {
    let net = compiled(lossless(nine_vertex()));
    let rs = generate_realizations(&net, 50, 5).unwrap();
    let (s, _) = ensemble_sweep(&rs, window(), 40).unwrap();
    let mut a: Vec<f64> = s.iter().map(asym).collect();
    a.sort_by(|x, y| x.total_cmp(y));
    assert!(a[a.len() / 2] > 0.05, "{}", a[a.len() / 2]);
}

#[test]
fn passive_graphs_are_subunitary() {
    for spec in [nine_vertex(), hexagon()] {
        let net = compiled(spec);
        for r in generate_realizations(&net, 10, 1).unwrap() {
            for s in frequency_sweep(&r, window(), 50).unwrap() {
                assert!(spectral_norm(&s.s) <= 1.0 + 1e-10);
            }
        }
    }
}

#[test]
fn lossless_sweep_is_unitary() {
    let net = compiled(lossless(hexagon()));
    let r = &generate_realizations(&net, 1, 2).unwrap()[0];
    let s = frequency_sweep(r, window(), 300).unwrap();
    assert_eq!(s.len(), 300);
    for x in &s {
        assert!(x.unitarity_defect() < 1e-10);
    }
}

#[test]
fn sweep_window_mapping() {
    // 3–7 GHz as vacuum wavenumbers acting on optical lengths
    let (lo, hi) = window();
    assert!((lo - 2.0 * std::f64::consts::PI * 3e9 / SPEED_OF_LIGHT).abs() < 1e-12);
    assert!((hi / lo - 7.0 / 3.0).abs() < 1e-14);
    // the same band on physical lengths needs √ε more phase per meter
    let eps = CoaxParams::RG402.epsilon;
    assert!((lo * eps.sqrt() - 2.0 * std::f64::consts::PI * 3e9 * eps.sqrt() / SPEED_OF_LIGHT).abs() < 1e-12);
    let r = Realization::base_of(compiled(nine_vertex()));
    let one = frequency_sweep(&r, window(), 1).unwrap();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0].coord, lo);
    assert!(frequency_sweep(&r, (hi, lo), 10).is_err());
    assert!(frequency_sweep(&r, (lo, lo), 10).is_err());
    // above the coax cutoff
    let k_cut = CoaxParams::RG402.cutoff_wavenumber();
    assert!(two_port_s(&r, 1.01 * k_cut).is_err());
}

#[test]
fn realizations_preserve_total_length() {
    let net = compiled(nine_vertex());
    let rs = generate_realizations(&net, 1500, 42).unwrap();
    assert_eq!(rs.len(), 1500);
    for r in &rs {
        let sum: f64 = r.length_deltas.iter().sum();
        assert!(sum.abs() <= 1e-15, "{sum}");
        assert!(r.lengths().iter().all(|&l| l > 0.0));
        let total: f64 = r.lengths().iter().sum();
        assert!((total - 3.61).abs() < 1e-12);
        assert!(r.length_deltas.iter().all(|d| d.abs() <= 2.0 * net.spec.delta_max));
    }
    let again = generate_realizations(&net, 1500, 42).unwrap();
    for (a, b) in rs.iter().zip(&again) {
        assert_eq!(a.length_deltas, b.length_deltas);
    }
    assert_ne!(rs[0].length_deltas, generate_realizations(&net, 1, 43).unwrap()[0].length_deltas);
}

#[test]
fn zero_amplitude_realization_equals_base() {
    let mut spec = nine_vertex();
    spec.delta_max = 0.0;
    let net = compiled(spec);
    let r = &generate_realizations(&net, 1, 3).unwrap()[0];
    assert!(r.length_deltas.iter().all(|&d| d == 0.0));
    let base = Realization::base_of(Arc::clone(&net));
    let k = 100.0;
    assert_eq!(two_port_s(r, k).unwrap().s, two_port_s(&base, k).unwrap().s);
}

#[test]
fn realization_errors() {
    let net = compiled(nine_vertex());
    assert!(generate_realizations(&net, 0, 1).is_err());
    let mut spec = nine_vertex();
    spec.shifter_edges.truncate(1);
    assert!(generate_realizations(&compiled(spec), 5, 1).is_err());
    let mut spec = nine_vertex();
    spec.delta_max = 1.0;
    assert!(generate_realizations(&compiled(spec), 5, 1).is_err());
}

#[test]
fn preset_structure() {
    let nine = nine_vertex();
    let joints = nine.vertices.iter().filter(|v| v.kind != VertexKind::Circulator).count();
    assert_eq!(joints, 9);
    assert_eq!(nine.vertices.iter().filter(|v| v.kind == VertexKind::Circulator).count(), 4);
    assert_eq!(nine.shifter_edges.len(), 4);
    assert!((nine.sum_of_lengths() - 3.61).abs() < 1e-12);
    let hex = hexagon();
    assert_eq!(hex.vertices.iter().filter(|v| v.kind != VertexKind::Circulator).count(), 6);
    assert_eq!(hex.edges.iter().filter(|e| e.lumped_attenuation == 1.0).count(), 14);
    let direct = hex.edges.iter().find(|e| e.endpoints == (1, 2)).unwrap();
    assert_eq!(direct.lumped_attenuation, 3.0);
    for p in [1, 2] {
        assert_eq!(hex.vertex(p).unwrap().valency, 6);
    }
    assert!((hex.sum_of_lengths() - 6.62).abs() < 1e-12);
    // both presets round-trip through the config format
    for s in [nine, hex] {
        assert_eq!(NetworkSpec::from_toml_str(&s.to_toml_string().unwrap()).unwrap(), s);
    }
    assert!(network_preset("square").unwrap_err().to_string().contains("nine-vertex"));
}

#[test]
fn port_coupling_matches_joint_valency() {
    // ⟨S_aa⟩ is the Neumann back-reflection 2/v − 1 of the port joint
    for (spec, t) in [(nine_vertex(), 8.0 / 9.0), (hexagon(), 5.0 / 9.0)] {
        let net = compiled(spec);
        let rs = generate_realizations(&net, 100, 9).unwrap();
        let (s, _) = ensemble_sweep(&rs, window(), 100).unwrap();
        let mean: Complex64 = s.iter().map(|x| x.s[0][0]).sum::<Complex64>() / s.len() as f64;
        assert!(((1.0 - mean.norm_sqr()) - t).abs() < 0.02, "{}", 1.0 - mean.norm_sqr());
    }
}

#[test]
fn default_networks_show_no_direct_process_flag() {
    for spec in [nine_vertex(), hexagon()] {
        let net = compiled(spec);
        let rs = generate_realizations(&net, 100, 4).unwrap();
        let (s, _) = ensemble_sweep(&rs, window(), 100).unwrap();
        let report = direct_process_check(&s).unwrap();
        assert!(!report.flagged, "{report:?}");
    }
}

#[test]
fn ring_resonances_stay_unitary() {
    // lossless loop hanging off the port joint, probed on its 2π multiples
    let text = r#"
port_vertices = [1, 2]
total_optical_length = 1.5

[[vertex]]
id = 1
kind = "port"
valency = 2

[[vertex]]
id = 2
kind = "port"
valency = 4

[[vertex]]
id = 3
kind = "joint"
valency = 2

[[edge]]
id = 1
endpoints = [1, 2]
optical_length = 0.5

[[edge]]
id = 2
endpoints = [2, 3]
optical_length = 0.5

[[edge]]
id = 3
endpoints = [3, 2]
optical_length = 0.5
"#;
    let r = Realization::base_of(compiled(NetworkSpec::from_toml_str(text).unwrap()));
    for n in 1..40 {
        let k = 2.0 * std::f64::consts::PI * n as f64;
        let (s, d) = two_port_s_with_diagnostics(&r, k).unwrap();
        assert!(s.unitarity_defect() < 1e-8);
        assert!(d.retries <= 4);
        assert!((d.k_used - k).abs() <= 4.0 * POLE_JITTER * k.max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // More lumped attenuation on one edge never raises ‖S‖ at fixed k.
    #[test]
    fn attenuation_never_increases_norm(edge in 0usize..19, ghz in 3.0f64..7.0, extra in 0.01f64..6.0) {
        let base = nine_vertex();
        let mut more = base.clone();
        more.edges[edge].lumped_attenuation += extra;
        let k = ghz_to_wavenumber(ghz);
        let a = two_port_s(&Realization::base_of(compiled(base)), k).unwrap().norm();
        let b = two_port_s(&Realization::base_of(compiled(more)), k).unwrap().norm();
        prop_assert!(b <= a + 1e-12, "{} -> {}", a, b);
    }

    #[test]
    fn norm_bounded_for_any_losses(eta in 0.0f64..2.0, db in 0.0f64..10.0, ghz in 3.0f64..7.0) {
        let mut spec = hexagon().with_uniform_loss(eta);
        spec.edges[3].lumped_attenuation = db;
        let s = two_port_s(&Realization::base_of(compiled(spec)), ghz_to_wavenumber(ghz)).unwrap();
        prop_assert!(spectral_norm(&s.s) <= 1.0 + 1e-10);
    }
}
