use std::collections::BTreeMap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{self, hermite_excited_norm_sqr, ConditionalState};
use crate::error::Result;
use crate::oracle::{self, TruncationPolicy};
use crate::params::{derive, DerivedParams, ModelParams};
use crate::quad::{integrate, simpson, simpson_2d};

use super::linspace;

/// Values below this magnitude are compared absolutely.
const SMALL: f64 = 1e-6;

/// Deliberate corruption of a derived coefficient, used to prove the report
/// can fail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    ScaleB1(f64),
    ScaleB2(f64),
}

impl Fault {
    fn apply(self, d: &mut DerivedParams) {
        match self {
            Fault::ScaleB1(s) => d.b1 *= s,
            Fault::ScaleB2(s) => d.b2 *= s,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationConfig {
    pub thetas: Vec<f64>,
    pub rs: Vec<f64>,
    pub ms: Vec<usize>,
    /// Per-check tolerance overrides, keyed by check name.
    pub tolerances: BTreeMap<String, f64>,
    pub fault: Option<Fault>,
    pub policy: TruncationPolicy,
    /// Heavier integral checks (smoothing, marginals) on every parameter
    /// set instead of only the first few.
    pub exhaustive: bool,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            thetas: vec![PI / 7.0, PI / 5.0, 2.0 * PI / 7.0, 3.0 * PI / 7.0],
            rs: vec![0.3, 0.5, 1.0],
            ms: (0..=4).collect(),
            tolerances: BTreeMap::new(),
            fault: None,
            policy: TruncationPolicy::default(),
            exhaustive: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub max_abs_error: f64,
    /// Over samples whose reference magnitude is at least 1e-6.
    pub max_rel_error: f64,
    /// Relative tolerance, or absolute for purely absolute checks.
    pub tolerance: f64,
    /// Absolute tolerance applied to small reference values.
    pub abs_tolerance: f64,
    pub pass: bool,
}

/// A closed form, as commonly written, that disagrees with the reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub name: String,
    pub statement: String,
    pub max_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub pass: bool,
    pub checks: Vec<Check>,
    pub findings: Vec<Finding>,
    pub config: ValidationConfig,
}

impl ValidationReport {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect()
    }
}

#[derive(Debug, Clone)]
struct Acc {
    check: Check,
    relative: bool,
}

impl Acc {
    fn relative(name: &str, rel: f64, abs: f64) -> Self {
        Acc { check: new_check(name, rel, abs), relative: true }
    }

    fn absolute(name: &str, tol: f64) -> Self {
        Acc { check: new_check(name, tol, tol), relative: false }
    }

    fn add(&mut self, got: f64, want: f64) {
        let c = &mut self.check;
        c.samples += 1;
        let err = (got - want).abs();
        if !err.is_finite() {
            c.max_abs_error = f64::INFINITY;
            c.pass = false;
            return;
        }
        c.max_abs_error = c.max_abs_error.max(err);
        if self.relative && want.abs() >= SMALL {
            let rel = err / want.abs();
            c.max_rel_error = c.max_rel_error.max(rel);
            c.pass &= rel <= c.tolerance;
        } else {
            c.pass &= err <= c.abs_tolerance;
        }
    }

    fn merge(&mut self, other: &Acc) {
        let (c, o) = (&mut self.check, &other.check);
        c.samples += o.samples;
        c.max_abs_error = c.max_abs_error.max(o.max_abs_error);
        c.max_rel_error = c.max_rel_error.max(o.max_rel_error);
        c.pass &= o.pass;
    }
}

fn new_check(name: &str, tol: f64, abs: f64) -> Check {
    Check {
        name: name.to_string(),
        samples: 0,
        max_abs_error: 0.0,
        max_rel_error: 0.0,
        tolerance: tol,
        abs_tolerance: abs,
        pass: true,
    }
}

/// Check names and their default `(tolerance, absolute tolerance, relative?)`.
const CHECKS: &[(&str, f64, f64, bool)] = &[
    ("p_event", 1e-8, 1e-10, true),
    ("legendre_path", 1e-10, 1e-10, true),
    ("legendre_branch", 1e-12, 1e-12, true),
    ("pnd", 1e-8, 1e-10, true),
    ("parity", 1e-14, 1e-14, false),
    ("pnd_normalization", 1e-10, 1e-10, false),
    ("mean_n", 1e-8, 1e-10, true),
    ("mandel_q", 1e-8, 1e-10, true),
    ("diagonal_moments", 1e-9, 1e-10, true),
    ("omega", 1e-9, 1e-9, true),
    ("qcd", 1e-8, 1e-10, true),
    ("qcd_normalization", 1e-8, 1e-8, false),
    ("wigner", 1e-8, 1e-10, true),
    ("wigner_origin", 1e-9, 1e-9, false),
    ("wigner_normalization", 1e-3, 1e-3, false),
    ("wigner_marginal", 1e-6, 1e-6, false),
    ("husimi", 1e-8, 1e-10, true),
    ("husimi_nonnegative", 0.0, 0.0, false),
    ("husimi_normalization", 1e-3, 1e-3, false),
    ("husimi_smoothing", 1e-4, 1e-4, false),
    ("completeness", 1e-8, 1e-8, false),
];

fn fresh(tolerances: &BTreeMap<String, f64>) -> BTreeMap<&'static str, Acc> {
    CHECKS
        .iter()
        .map(|&(name, tol, abs, rel)| {
            let tol = tolerances.get(name).copied().unwrap_or(tol);
            let abs = if rel { abs } else { tol };
            let acc = if rel { Acc::relative(name, tol, abs) } else { Acc::absolute(name, tol) };
            (name, acc)
        })
        .collect()
}

struct Case {
    params: ModelParams,
    heavy: bool,
}

/// Runs every analytic-versus-oracle comparison over the configured grid.
pub fn validate(config: &ValidationConfig) -> Result<ValidationReport> {
    for name in config.tolerances.keys() {
        if !CHECKS.iter().any(|c| c.0 == name) {
            return Err(crate::error::Error::InvalidSpec(format!("unknown check `{name}` in tolerance overrides")));
        }
    }
    let mut cases = Vec::new();
    for &theta in &config.thetas {
        for &r in &config.rs {
            for &m in &config.ms {
                let params = ModelParams::new(theta, r, m)?;
                // zero-probability points have nothing to compare
                if ConditionalState::new(&params).is_err() {
                    continue;
                }
                let heavy = config.exhaustive || cases.len() % 7 == 0;
                cases.push(Case { params, heavy });
            }
        }
    }
    let partials: Vec<BTreeMap<&'static str, Acc>> =
        cases.par_iter().map(|c| run_case(c, config)).collect::<Result<_>>()?;

    let mut accs = fresh(&config.tolerances);
    for part in &partials {
        for (name, acc) in part {
            accs.get_mut(name).expect("same check set").merge(acc);
        }
    }
    for &theta in &config.thetas {
        for &r in &config.rs {
            let mut d = derive(&ModelParams::new(theta, r, 0)?)?;
            if let Some(f) = config.fault {
                f.apply(&mut d);
            }
            let total = completeness_sum(&d);
            accs.get_mut("completeness").unwrap().add(total, 1.0);
        }
    }

    let checks: Vec<Check> = CHECKS.iter().map(|c| accs[c.0].check.clone()).collect();
    let findings = findings(config)?;
    Ok(ValidationReport { pass: checks.iter().all(|c| c.pass), checks, findings, config: config.clone() })
}

/// `Σ_{m ≤ M} p(m)` with `M` chosen so that the Schmidt tail beyond it is
/// below 1e-13.
pub fn completeness_sum(d: &DerivedParams) -> f64 {
    let t2 = d.tanh_r * d.tanh_r;
    let mut big_m = 0usize;
    // a Schmidt term |n,n> can herald at most 2n photons
    while t2.powi((big_m / 2 + 1) as i32) >= 1e-13 && big_m < 4000 {
        big_m += 2;
    }
    (0..=big_m).map(|m| analytic::norm_direct(d, m)).sum()
}

fn run_case(case: &Case, config: &ValidationConfig) -> Result<BTreeMap<&'static str, Acc>> {
    let mut acc = fresh(&config.tolerances);
    let p = case.params;
    let m = p.m;
    let mut d = derive(&p)?;
    if let Some(f) = config.fault {
        f.apply(&mut d);
    }
    let state = ConditionalState::from_derived(d, m)?;
    let (orc, p_orc) = oracle::conditional_amplitudes(&p, &config.policy)?;
    let mut add = |name: &str, got: f64, want: f64| acc.get_mut(name).unwrap().add(got, want);

    add("p_event", state.event_probability(), p_orc);
    if d.b3.abs() >= 1e-6 {
        let direct = analytic::norm_direct(&d, m);
        if let Some(leg) = analytic::norm_legendre(&d, m)? {
            add("legendre_path", leg, direct);
            let flipped = analytic::norm_legendre_branch(&d, m, true)?.unwrap_or(f64::NAN);
            add("legendre_branch", flipped, leg);
        }
    }

    let mut diag1 = 0.0;
    let mut diag2 = 0.0;
    let mut total = 0.0;
    for n in 0..=orc.n_max().max(40) {
        let pn = state.pnd(n);
        total += pn;
        diag1 += pn * (n + 1) as f64;
        diag2 += pn * ((n + 1) * (n + 2)) as f64;
        if n <= 40 {
            if (n + m) % 2 == 1 {
                add("parity", pn, 0.0);
            } else {
                add("pnd", pn, oracle::oracle_pnd(&orc, n));
            }
        }
    }
    add("pnd_normalization", total, 1.0);
    add("diagonal_moments", state.moments(1, 1)?.re, diag1);
    add("diagonal_moments", state.moments(2, 2)?.re, diag2);
    add("mean_n", state.mean_photon()?, oracle::oracle_mean(&orc));
    if m > 0 || d.mu != 0.0 {
        add("mandel_q", state.mandel_q()?, oracle::oracle_q(&orc)?);
    }
    if let Some(om) = state.omega() {
        add("omega", om * hermite_excited_norm_sqr(&d, m, orc.n_max().max(200))?, 1.0);
    }

    for &phi in &[0.0, PI / 4.0, PI / 2.0] {
        for x in linspace(-6.0, 6.0, 101) {
            add("qcd", state.qcd(x, phi), oracle::oracle_qcd(&orc, x, phi));
        }
        let half = quad_half_width(&state);
        add("qcd_normalization", integrate(|x| state.qcd(x, phi), -half, half, 16, 1e-12), 1.0);
    }

    let axis = linspace(-4.0, 4.0, 41);
    for &y in &axis {
        for &x in &axis {
            add("wigner", state.wigner(x, y), oracle::oracle_wigner(&orc, x, y));
            let q = state.husimi(x, y);
            add("husimi", q, oracle::oracle_husimi(&orc, x, y));
            add("husimi_nonnegative", q.min(0.0), 0.0);
        }
    }
    let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
    add("wigner_origin", state.wigner(0.0, 0.0), sign * 2.0 / PI);

    // wide enough that the Husimi tails outside it stay below 1e-4 for r <= 1
    let window = linspace(-10.0, 10.0, 201);
    let h = window[1] - window[0];
    let w: Vec<f64> = window.iter().flat_map(|&y| window.iter().map(move |&x| (x, y))).map(|(x, y)| state.wigner_density(x, y)).collect();
    add("wigner_normalization", simpson_2d(&w, 201, h, h), 1.0);
    // Husimi is normalized over d²β = dx dp / 2
    let q: Vec<f64> = window.iter().flat_map(|&y| window.iter().map(move |&x| (x, y))).map(|(x, y)| 0.5 * state.husimi(x, y)).collect();
    add("husimi_normalization", simpson_2d(&q, 201, h, h), 1.0);

    if case.heavy {
        for x in linspace(-3.0, 3.0, 7) {
            add("wigner_marginal", wigner_marginal(&state, x), state.qcd(x, 0.0));
        }
        for &(x, y) in &[(0.0, 0.0), (0.9, -0.6), (-1.5, 1.2)] {
            add("husimi_smoothing", smoothed_wigner(&state, x, y), state.husimi(x, y));
        }
    }
    Ok(acc)
}

/// Half-width that holds all but a negligible part of the homodyne density.
fn quad_half_width(state: &ConditionalState) -> f64 {
    let spread = (2.0 * state.mean_photon().unwrap_or(0.0) + 1.0).sqrt() * state.derived().lambda.exp();
    8.0 + 8.0 * spread
}

/// `∫ W dp` with `W` normalized as a density in `(x, p)`, by Simpson on 201
/// points over `[-6, 6]`.
pub fn wigner_marginal(state: &ConditionalState, x: f64) -> f64 {
    let ps = linspace(-6.0, 6.0, 201);
    let vals: Vec<f64> = ps.iter().map(|&p| state.wigner_density(x, p)).collect();
    simpson(&vals, ps[1] - ps[0])
}

/// `(1/π) ∬ W(x', p') exp(-((x-x')² + (p-p')²)) dx' dp'`.
pub fn smoothed_wigner(state: &ConditionalState, x: f64, p: f64) -> f64 {
    let n = 161;
    let xs = linspace(x - 6.0, x + 6.0, n);
    let ps = linspace(p - 6.0, p + 6.0, n);
    let vals: Vec<f64> = ps
        .iter()
        .flat_map(|&pp| xs.iter().map(move |&xx| (xx, pp)))
        .map(|(xx, pp)| state.wigner(xx, pp) * (-((x - xx).powi(2) + (p - pp).powi(2))).exp())
        .collect();
    simpson_2d(&vals, n, xs[1] - xs[0], ps[1] - ps[0]) / PI
}

fn findings(config: &ValidationConfig) -> Result<Vec<Finding>> {
    let mut legendre = 0.0f64;
    let mut wigner = 0.0f64;
    let mut gaussian = 0.0f64;
    let mut mean_r = 0.0f64;
    let mut min_q = f64::INFINITY;
    for &theta in &config.thetas {
        for &r in &config.rs {
            let d = derive(&ModelParams::new(theta, r, 0)?)?;
            for &m in &config.ms {
                let Ok(state) = ConditionalState::from_derived(d, m) else { continue };
                let direct = analytic::norm_direct(&d, m);
                if let Some(printed) = analytic::norm_legendre_printed(&d, m)? {
                    legendre = legendre.max((printed - direct).abs() / direct);
                }
                for &(x, y) in &[(0.7, 0.2), (-1.1, 0.9), (1.6, -1.3)] {
                    wigner = wigner.max((state.wigner_printed(x, y) - state.wigner(x, y)).abs());
                }
                if m == 0 {
                    let l = d.lambda;
                    for &(x, y) in &[(0.5, 0.0), (0.0, 0.5), (1.0, -0.8)] {
                        let g = (-y * y * (-2.0 * l).exp() - x * x * (2.0 * l).exp()).exp() / PI;
                        gaussian = gaussian.max((state.wigner_density(x, y) - g).abs());
                    }
                    mean_r = mean_r.max((state.mean_photon()? - r.sinh().powi(2)).abs());
                } else if let Ok(q) = state.mandel_q() {
                    min_q = min_q.min(q);
                }
            }
        }
    }
    let fock_q = ConditionalState::new(&ModelParams::new(0.0, 0.5, 1)?)?.mandel_q()?;
    min_q = min_q.min(fock_q);

    let mut out = Vec::new();
    let mut push = |name: &str, statement: &str, dev: f64, threshold: f64| {
        if dev > threshold {
            out.push(Finding { name: name.into(), statement: statement.into(), max_deviation: dev });
        }
    };
    push(
        "legendre_sign",
        "(-sqrt(B3))^m P_m(sqrt(B4)) with independent principal roots is off by (-1)^m where B3 > 0; (sqrt(B3))^m P_m(B2/sqrt(B3)) is branch-consistent",
        legendre,
        1e-10,
    );
    push(
        "wigner_b1_sign",
        "the Wigner sum needs (B1/2)^(m-l), not (-B1/2)^(m-l); the sign is invisible at the origin",
        wigner,
        1e-10,
    );
    push(
        "m0_wigner_gaussian",
        "for m = 0 the Wigner density is exp(-x^2 e^(-2 lambda) - p^2 e^(2 lambda))/pi; the form with x and p exchanged is wrong",
        gaussian,
        1e-10,
    );
    push(
        "m0_mean_photon",
        "for m = 0 the mean photon number is sinh^2(lambda), not sinh^2(r)",
        mean_r,
        1e-10,
    );
    push(
        "mandel_q_lower_bound",
        "Mandel Q is not bounded below by 0; a Fock state has Q = -1",
        (-min_q).max(0.0),
        0.0,
    );
    Ok(out)
}
