use std::f64::consts::PI;

use hesvs::analytic::ConditionalState;
use hesvs::gridscan::{
    self, grid, q_region_map, sweep, Fault, GridObservable, GridSpec, QMapSpec, SweepObservable, SweepSpec,
    SweepVariable, ValidationConfig,
};
use hesvs::oracle::{conditional_amplitudes, oracle_q, TruncationPolicy};
use hesvs::params::ModelParams;

fn values(t: &gridscan::Table, col: &str) -> Vec<Option<f64>> {
    t.column(col).unwrap().iter().map(|c| c.as_f64()).collect()
}

fn local_maxima(v: &[f64]) -> usize {
    v.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count()
}

#[test]
fn probability_curves_have_one_interior_peak_moving_right() {
    let spec = SweepSpec { variable: SweepVariable::R, range: [0.01, 3.0], points: 300, theta: PI / 7.0, r: 0.0, m_list: vec![1, 2, 3, 4] };
    let t = sweep(&spec, SweepObservable::PEvent).unwrap();
    let p = values(&t, "p_event");
    let mut last = 0.0;
    for curve in p.chunks(300) {
        let curve: Vec<f64> = curve.iter().map(|v| v.unwrap()).collect();
        assert_eq!(local_maxima(&curve), 1);
        let at = spec.values()[curve.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0];
        assert!(at > last);
        last = at;
    }
}

#[test]
fn mean_photon_sweep_is_mirror_symmetric() {
    let spec = SweepSpec { variable: SweepVariable::Theta, range: [0.0, PI / 2.0], points: 41, theta: 0.0, r: 0.5, m_list: vec![2, 4] };
    let t = sweep(&spec, SweepObservable::MeanN).unwrap();
    for curve in values(&t, "mean_n").chunks(41) {
        for i in 0..41 {
            let (a, b) = (curve[i].unwrap(), curve[40 - i].unwrap());
            assert!((a - b).abs() < 1e-9 * a.max(1.0));
        }
    }
}

#[test]
fn mandel_q_sweep_matches_oracle() {
    let spec = SweepSpec { variable: SweepVariable::R, range: [0.1, 1.5], points: 8, theta: PI / 5.0, r: 0.0, m_list: vec![1] };
    let t = sweep(&spec, SweepObservable::MandelQ).unwrap();
    for (r, q) in spec.values().into_iter().zip(values(&t, "mandel_q")) {
        let p = ModelParams::new(PI / 5.0, r, 1).unwrap();
        let (state, _) = conditional_amplitudes(&p, &TruncationPolicy::default()).unwrap();
        let want = oracle_q(&state).unwrap();
        assert!((q.unwrap() - want).abs() < 1e-9 * want.abs().max(1.0));
    }
}

#[test]
fn wigner_grid_has_negative_valley_and_husimi_is_nonnegative() {
    let p = ModelParams::new(PI / 7.0, 0.5, 1).unwrap();
    let w = grid(&GridSpec::phase_space(GridObservable::Wigner), &p).unwrap();
    assert!(values(&w, "wigner").iter().any(|v| v.unwrap() < 0.0));
    for m in 0..=4 {
        let h = grid(&GridSpec::phase_space(GridObservable::Husimi), &p.with_m(m)).unwrap();
        assert!(values(&h, "husimi").iter().all(|v| v.unwrap() >= 0.0));
    }
}

#[test]
fn homodyne_density_has_two_peaks_at_quarter_turn() {
    for m in 1..=4 {
        let s = ConditionalState::new(&ModelParams::new(PI / 7.0, 0.5, m).unwrap()).unwrap();
        let xs = gridscan::linspace(-5.0, 5.0, 401);
        let v: Vec<f64> = xs.iter().map(|&x| s.qcd(x, PI / 2.0)).collect();
        assert_eq!(local_maxima(&v), 2, "m={m}");
    }
}

#[test]
fn homodyne_wavefunction_oscillates_at_phase_zero() {
    for m in 1..=4 {
        let s = ConditionalState::new(&ModelParams::new(PI / 7.0, 0.5, m).unwrap()).unwrap();
        let xs = gridscan::linspace(-6.0, 6.0, 1200);
        let psi: Vec<f64> = xs.iter().map(|&x| s.quad_wavefunction(x, 0.0).re).collect();
        let changes = psi.windows(2).filter(|w| w[0].signum() != w[1].signum() && w[0] != 0.0).count();
        assert!(changes >= m, "m={m}: {changes}");
    }
}

#[test]
fn husimi_peak_count_differs_between_one_and_two_photons() {
    let spec = GridSpec { x_range: [-4.0, 4.0], y_range: [-4.0, 4.0], nx: 161, ny: 161, observable: GridObservable::Husimi };
    let count = |m| {
        let s = ConditionalState::new(&ModelParams::new(PI / 7.0, 0.5, m).unwrap()).unwrap();
        let v = gridscan::grid_values(&spec, &s).unwrap();
        let n = spec.nx;
        let mut peaks = 0;
        for j in 1..n - 1 {
            for i in 1..n - 1 {
                let c = v[j * n + i];
                if [v[j * n + i - 1], v[j * n + i + 1], v[(j - 1) * n + i], v[(j + 1) * n + i]].iter().all(|&o| c > o) {
                    peaks += 1;
                }
            }
        }
        peaks
    };
    assert_eq!(count(1), 2);
    assert_eq!(count(2), 1);
}

#[test]
fn q_map_changes_sign_and_is_row_symmetric() {
    for m in 1..=4 {
        let spec = QMapSpec::full(m, 31, 11);
        let t = q_region_map(&spec).unwrap();
        let q = values(&t, "mandel_q");
        assert!(q.iter().flatten().any(|&v| v < 0.0) && q.iter().flatten().any(|&v| v > 0.0));
        for row in q.chunks(31) {
            for i in 0..31 {
                match (row[i], row[30 - i]) {
                    (Some(a), Some(b)) => assert!((a - b).abs() < 1e-9 * a.abs().max(1.0)),
                    (a, b) => assert_eq!(a.is_none(), b.is_none()),
                }
            }
        }
    }
}

#[test]
fn output_is_identical_across_thread_counts() {
    let p = ModelParams::new(PI / 7.0, 0.5, 3).unwrap();
    let spec = GridSpec::phase_space(GridObservable::Wigner);
    let render = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let mut buf = Vec::new();
            grid(&spec, &p).unwrap().write_csv(&mut buf).unwrap();
            buf
        })
    };
    assert_eq!(render(1), render(4));
}

fn small_config() -> ValidationConfig {
    ValidationConfig { thetas: vec![PI / 7.0], rs: vec![0.5], ms: vec![1, 2], ..Default::default() }
}

#[test]
fn validation_passes_clean_and_fails_under_fault() {
    let clean = gridscan::validate(&small_config()).unwrap();
    assert!(clean.pass, "{:?}", clean.failed());
    let broken = gridscan::validate(&ValidationConfig { fault: Some(Fault::ScaleB1(1.01)), ..small_config() }).unwrap();
    assert!(!broken.pass);
    assert!(broken.failed().contains(&"p_event"));
    let broken = gridscan::validate(&ValidationConfig { fault: Some(Fault::ScaleB2(0.99)), ..small_config() }).unwrap();
    assert!(broken.failed().contains(&"pnd"));
}

#[test]
fn tolerance_override_is_honored() {
    let mut config = small_config();
    config.tolerances.insert("wigner_origin".into(), 0.0);
    config.tolerances.insert("pnd".into(), 1e-20);
    let report = gridscan::validate(&config).unwrap();
    assert_eq!(report.check("pnd").unwrap().tolerance, 1e-20);
    assert!(!report.check("pnd").unwrap().pass);
    config.tolerances.insert("no_such_check".into(), 1.0);
    assert!(gridscan::validate(&config).is_err());
}

#[test]
fn report_lists_formula_findings() {
    let report = gridscan::validate(&ValidationConfig { ms: vec![0, 1, 3], ..small_config() }).unwrap();
    let names: Vec<&str> = report.findings.iter().map(|f| f.name.as_str()).collect();
    for expected in ["wigner_b1_sign", "m0_wigner_gaussian", "m0_mean_photon", "mandel_q_lower_bound"] {
        assert!(names.contains(&expected), "{names:?}");
    }
    let json = serde_json::to_string(&report).unwrap();
    let back: gridscan::ValidationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back.checks.len(), report.checks.len());
}
