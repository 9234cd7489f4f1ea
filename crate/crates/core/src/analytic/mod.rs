//! Closed-form observables of the heralded Hermite-excited squeezed vacuum.
//!
//! [`ConditionalState`] caches the derived symbols and the normalization
//! `N_m = p(m)` for one `(θ, r, m)` and evaluates every observable from
//! them. The free functions mirror its methods for one-off calls.

mod series;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{derive, phase_params, wigner_aux, DerivedParams, ModelParams, PhaseParams};
use crate::specfun::{hermite, hermite_scaled, legendre, log_factorial, signed_log_pow, LogSum};
use crate::state::FockState;
use series::{Monomial, Series4};

/// Below this `|B3|` the Legendre route is not used as a cross-check.
pub const LEGENDRE_B3_CUTOFF: f64 = 1e-12;

/// Largest `k + l` accepted by [`ConditionalState::moments`].
pub const MAX_MOMENT_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Analytic,
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObservableReport {
    pub p_event: f64,
    pub mean_n: f64,
    /// `None` when the heralded state is the vacuum.
    pub mandel_q: Option<f64>,
    pub source: Source,
}

/// `N_m` by direct coefficient extraction of the Gaussian generating function:
/// `m!/(√A cosh²r) Σ_a (B1/2)^{2a} B2^{m-2a} / (a!² (m-2a)!)`.
pub fn norm_direct(d: &DerivedParams, m: usize) -> f64 {
    let mut sum = LogSum::new();
    for a in 0..=m / 2 {
        let (s1, l1) = signed_log_pow(d.b1 / 2.0, 2 * a as u64);
        let (s2, l2) = signed_log_pow(d.b2, (m - 2 * a) as u64);
        let lf = 2.0 * log_factorial(a as u64) + log_factorial((m - 2 * a) as u64);
        sum.add(s1 * s2, l1 + l2 - lf);
    }
    let (sign, log) = sum.finish();
    sign * (log + log_factorial(m as u64) - 0.5 * d.a.ln() - 2.0 * d.cosh_r.ln()).exp()
}

/// `N_m = (√B3)^m P_m(B2/√B3) / (cosh²r √A)`. Negating `√B3` leaves the
/// value unchanged. `None` where `B3` vanishes.
pub fn norm_legendre_branch(d: &DerivedParams, m: usize, flip_branch: bool) -> Result<Option<f64>> {
    if d.b4.is_none() {
        return Ok(None);
    }
    let sign = if flip_branch { -1.0 } else { 1.0 };
    let root3 = sign * Complex64::new(d.b3, 0.0).sqrt();
    let value = root3.powu(m as u32) * legendre(m, d.b2 / root3)? / (d.cosh_r * d.cosh_r * d.a.sqrt());
    Ok(Some(value.re))
}

/// Legendre route for `N_m`.
pub fn norm_legendre(d: &DerivedParams, m: usize) -> Result<Option<f64>> {
    norm_legendre_branch(d, m, false)
}

/// `(-√B3)^m P_m(√B4) / (cosh²r √A)` with both roots taken independently on
/// the principal branch. Matches [`norm_direct`] where `B3 < 0` and is off by
/// `(-1)^m` where `B3 > 0`.
pub fn norm_legendre_printed(d: &DerivedParams, m: usize) -> Result<Option<f64>> {
    let Some(b4) = d.b4 else { return Ok(None) };
    let root3 = -Complex64::new(d.b3, 0.0).sqrt();
    let root4 = Complex64::new(b4, 0.0).sqrt();
    let value = root3.powu(m as u32) * legendre(m, root4)? / (d.cosh_r * d.cosh_r * d.a.sqrt());
    Ok(Some(value.re))
}

fn zero_probability_reason(d: &DerivedParams, m: usize) -> Option<String> {
    if d.r == 0.0 && m > 0 {
        return Some(format!("r = 0 puts no photons into the output ports, so m = {m} cannot be detected"));
    }
    if d.is_balanced() && m % 2 == 1 {
        return Some(format!("a balanced beam splitter never heralds odd m = {m}"));
    }
    None
}

/// Probability `p(m)` of detecting `m` photons, equal to `N_m`.
pub fn event_probability(d: &DerivedParams, m: usize) -> Result<f64> {
    if let Some(reason) = zero_probability_reason(d, m) {
        return Err(Error::ZeroProbability(reason));
    }
    let n = norm_direct(d, m);
    if !(n >= 1e-300) {
        return Err(Error::ZeroProbability(format!("p(m = {m}) = {n:e} underflows")));
    }
    Ok(n)
}

/// `Ω_m = μ^m cosh λ / (2^m m! N_m cosh² r)`, the squared prefactor of the
/// Hermite-excited form. `None` at `μ = 0` where that form degenerates.
pub fn omega(d: &DerivedParams, m: usize, norm: f64) -> Option<f64> {
    if d.mu == 0.0 {
        return None;
    }
    let log = m as f64 * (d.mu / 2.0).ln() + d.lambda.cosh().ln()
        - log_factorial(m as u64)
        - norm.ln()
        - 2.0 * d.cosh_r.ln();
    Some(log.exp())
}

/// Squared norm of `H_m(ν a† / √(2μ)) S(λ)|0>` built in the photon-number
/// basis up to `n_max`. `Ω_m` times this should be one.
pub fn hermite_excited_norm_sqr(d: &DerivedParams, m: usize, n_max: usize) -> Result<f64> {
    if d.mu == 0.0 {
        return Err(Error::invalid("mu", d.mu, "Hermite-excited form needs mu > 0"));
    }
    let t = d.lambda.tanh();
    // squeezed vacuum amplitudes
    let mut sq = vec![0.0; n_max + 1];
    for k in 0..=n_max / 2 {
        let (st, lt) = signed_log_pow(t / 2.0, k as u64);
        let l = lt + 0.5 * log_factorial(2 * k as u64) - log_factorial(k as u64) - 0.5 * d.lambda.cosh().ln();
        sq[2 * k] = st * l.exp();
    }
    // H_m(c a†) = Σ_j h_j c^j a†^j
    let cst = d.nu / (2.0 * d.mu).sqrt();
    let mut out = vec![0.0; n_max + 1];
    for j in 0..=m {
        if (m - j) % 2 == 1 {
            continue;
        }
        let i = (m - j) / 2;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let (sc, lc) = signed_log_pow(2.0 * cst, j as u64);
        let lh = log_factorial(m as u64) - log_factorial(i as u64) - log_factorial(j as u64) + lc;
        for (n, a) in sq.iter().enumerate() {
            if *a == 0.0 || n + j > n_max {
                continue;
            }
            let ladder = 0.5 * (log_factorial((n + j) as u64) - log_factorial(n as u64));
            out[n + j] += sign * sc * (lh + ladder).exp() * a;
        }
    }
    Ok(out.iter().map(|v| v * v).sum())
}

/// Everything needed to evaluate closed forms for one `(θ, r, m)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalState {
    m: usize,
    derived: DerivedParams,
    norm: f64,
}

impl ConditionalState {
    pub fn new(p: &ModelParams) -> Result<Self> {
        Self::from_derived(derive(p)?, p.m)
    }

    /// Builds from an already-derived (possibly deliberately perturbed) symbol set.
    pub fn from_derived(derived: DerivedParams, m: usize) -> Result<Self> {
        if m > crate::params::MAX_M {
            return Err(Error::invalid("m", m, format!("must not exceed {}", crate::params::MAX_M)));
        }
        let norm = event_probability(&derived, m)?;
        Ok(ConditionalState { m, derived, norm })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn derived(&self) -> &DerivedParams {
        &self.derived
    }

    pub fn params(&self) -> ModelParams {
        ModelParams { theta: self.derived.theta, r: self.derived.r, m: self.m }
    }

    pub fn event_probability(&self) -> f64 {
        self.norm
    }

    pub fn omega(&self) -> Option<f64> {
        omega(&self.derived, self.m, self.norm)
    }

    /// Normalized amplitude `<n|Ψ_m>`; exactly zero when `n + m` is odd.
    pub fn fock_amplitude(&self, n: usize) -> Complex64 {
        let (m, d) = (self.m, &self.derived);
        if (n + m) % 2 == 1 {
            return Complex64::new(0.0, 0.0);
        }
        let mut sum = LogSum::new();
        for g in (m % 2..=m.min(n)).step_by(2) {
            let (sm, lm) = signed_log_pow(d.mu / 2.0, ((m + n - 2 * g) / 2) as u64);
            let (sn, ln) = signed_log_pow(d.nu, g as u64);
            let sign = if ((m - g) / 2) % 2 == 1 { -1.0 } else { 1.0 };
            let lf = log_factorial(((n - g) / 2) as u64)
                + log_factorial(((m - g) / 2) as u64)
                + log_factorial(g as u64);
            sum.add(sign * sm * sn, lm + ln - lf);
        }
        let (sign, log) = sum.finish();
        let pref = 0.5 * (log_factorial(m as u64) + log_factorial(n as u64) - self.norm.ln())
            - d.cosh_r.ln();
        Complex64::new(sign * (log + pref).exp(), 0.0)
    }

    /// Photon-number distribution `P(n|m)`.
    pub fn pnd(&self, n: usize) -> f64 {
        self.fock_amplitude(n).norm_sqr()
    }

    /// Closed-form amplitudes for `n = 0..=n_max`, renormalized over the cut.
    pub fn fock_state(&self, n_max: usize) -> Result<FockState> {
        FockState::from_unnormalized((0..=n_max).map(|n| self.fock_amplitude(n)).collect(), self.m)
    }

    /// `<a^k a†^l>` by coefficient extraction from the Gaussian generating
    /// function in `(s, τ, x, y)`.
    pub fn moments(&self, k: usize, l: usize) -> Result<Complex64> {
        if k + l > MAX_MOMENT_ORDER {
            return Err(Error::DegreeOverflow(k + l));
        }
        let (m, d) = (self.m, &self.derived);
        let inv_a = 1.0 / d.a;
        let mono = |exps: [usize; 4], coef: f64| Monomial { exps, coef };
        let q = [
            mono([2, 0, 0, 0], -d.b1 / 2.0),
            mono([0, 2, 0, 0], -d.b1 / 2.0),
            mono([1, 1, 0, 0], d.b2),
            mono([1, 0, 1, 0], d.mu * d.nu * inv_a),
            mono([0, 1, 0, 1], d.mu * d.nu * inv_a),
            mono([1, 0, 0, 1], d.nu * inv_a),
            mono([0, 1, 1, 0], d.nu * inv_a),
            mono([0, 0, 2, 0], d.mu * inv_a / 2.0),
            mono([0, 0, 0, 2], d.mu * inv_a / 2.0),
            mono([0, 0, 1, 1], inv_a),
        ];
        let coef = Series4::exp_quadratic_coefficient(&q, [m, m, k, l]);
        let log_scale = log_factorial(m as u64) + log_factorial(k as u64) + log_factorial(l as u64)
            - self.norm.ln()
            - 2.0 * d.cosh_r.ln()
            - 0.5 * d.a.ln();
        Ok(Complex64::new(coef * log_scale.exp(), 0.0))
    }

    /// `<n> = <a a†> - 1`.
    pub fn mean_photon(&self) -> Result<f64> {
        let aad = self.moments(1, 1)?;
        debug_assert!(aad.im.abs() < 1e-10);
        Ok(aad.re - 1.0)
    }

    /// Mandel `Q = (<a²a†²> - <aa†>² - 2<aa†> + 1) / (<aa†> - 1)`.
    pub fn mandel_q(&self) -> Result<f64> {
        let aad = self.moments(1, 1)?.re;
        let a2ad2 = self.moments(2, 2)?.re;
        let mean = aad - 1.0;
        if mean.abs() < 1e-14 {
            return Err(Error::UndefinedMandelQ);
        }
        Ok((a2ad2 - aad * aad - 2.0 * aad + 1.0) / mean)
    }

    pub fn report(&self) -> Result<ObservableReport> {
        let mandel_q = match self.mandel_q() {
            Ok(q) => Some(q),
            Err(Error::UndefinedMandelQ) => None,
            Err(e) => return Err(e),
        };
        Ok(ObservableReport { p_event: self.norm, mean_n: self.mean_photon()?, mandel_q, source: Source::Analytic })
    }

    pub fn phase(&self, phi: f64) -> PhaseParams {
        phase_params(&self.derived, phi)
    }

    /// Homodyne wavefunction
    /// `π^{-1/4} (√(Γ/2))^m e^{-Πx²/2} H_m(Δx/√Γ) / (√(N_m m! Θ) cosh r)`.
    pub fn quad_wavefunction(&self, x: f64, phi: f64) -> Complex64 {
        let pp = self.phase(phi);
        let m = self.m;
        let gamma = pp.gamma_c;
        let poly = if gamma.norm() > 1e-12 {
            let root = gamma.sqrt();
            (root / 2f64.sqrt()).powu(m as u32) * hermite(m, pp.delta_c * x / root).expect("m <= 30")
        } else {
            // (Γ/2)^{m/2} H_m(Δx/√Γ) = 2^{-m/2} Γ^{m/2} H_m(Δx/√Γ)
            hermite_scaled(m, pp.delta_c * x, gamma).expect("m <= 30") * 2f64.powf(-(m as f64) / 2.0)
        };
        let gauss = (-pp.pi_c * x * x / 2.0).exp();
        let denom = (self.norm * (log_factorial(m as u64)).exp() * pp.theta_c).sqrt() * self.derived.cosh_r;
        PI.powf(-0.25) * poly * gauss / denom
    }

    /// Homodyne density `P(x, φ|m)`.
    pub fn qcd(&self, x: f64, phi: f64) -> f64 {
        self.quad_wavefunction(x, phi).norm_sqr()
    }

    /// Wigner function at `α = (x + ip)/√2`, normalized so that
    /// `∫ W d²α = 1` (so `∬ W dx dp = 2` and `W(0,0) = ±2/π`).
    pub fn wigner(&self, x: f64, p: f64) -> f64 {
        self.wigner_with_sign(x, p, 1.0)
    }

    /// The Wigner sum with `(-B1/2)^{m-l}` in place of `(B1/2)^{m-l}`. Differs
    /// from [`Self::wigner`] away from the `ν = 0` and `m ≤ 1` cases; kept to
    /// quantify that discrepancy.
    pub fn wigner_printed(&self, x: f64, p: f64) -> f64 {
        self.wigner_with_sign(x, p, -1.0)
    }

    fn wigner_with_sign(&self, x: f64, p: f64, b1_sign: f64) -> f64 {
        let (m, d) = (self.m, &self.derived);
        let alpha = Complex64::new(x, p) / 2f64.sqrt();
        let exponent = (-2.0 * d.xi * alpha.norm_sqr()
            + (2.0 * d.mu / d.a) * (alpha * alpha + alpha.conj() * alpha.conj()))
        .re;
        let r = wigner_aux(d, alpha);
        let q = Complex64::new(2.0 * d.b1, 0.0);
        let mut sum = 0.0;
        for l in 0..=m {
            let n = m - l;
            let (sb, lb) = signed_log_pow(-d.b2, l as u64);
            if sb == 0.0 {
                continue;
            }
            let coef = sb * (lb - log_factorial(l as u64) - 2.0 * log_factorial(n as u64)).exp();
            // (B1/2)^n |H_n(R/√(2B1))|² = |(2B1)^{n/2} H_n(R/√(2B1))|² / 4^n
            let h = hermite_scaled(n, r, q).expect("m <= 30");
            sum += coef * b1_sign.powi(n as i32) * h.norm_sqr() / 4f64.powi(n as i32);
        }
        let pref = 2.0 * (log_factorial(m as u64) - self.norm.ln() - 2.0 * d.cosh_r.ln() - 0.5 * d.a.ln()).exp() / PI;
        pref * exponent.exp() * sum
    }

    /// Wigner function as a density in `(x, p)`: `∬ W dx dp = 1`.
    pub fn wigner_density(&self, x: f64, p: f64) -> f64 {
        0.5 * self.wigner(x, p)
    }

    /// Husimi function `|<β|Ψ_m>|²/π` at `β = (x + ip)/√2`, normalized so that
    /// `∫ Q d²β = 1`.
    pub fn husimi(&self, x: f64, p: f64) -> f64 {
        let (m, d) = (self.m, &self.derived);
        let beta = Complex64::new(x, p) / 2f64.sqrt();
        let denom = PI * self.norm * log_factorial(m as u64).exp() * d.cosh_r * d.cosh_r;
        let envelope = (-beta.norm_sqr() + d.mu / 2.0 * (beta * beta + beta.conj() * beta.conj())).re;
        if d.mu > 0.0 {
            let h = hermite(m, d.nu * beta.conj() / (2.0 * d.mu).sqrt()).expect("m <= 30");
            let value = (d.mu / 2.0).powi(m as i32) * envelope.exp() * h.norm_sqr() / denom;
            if value.is_finite() {
                return value;
            }
        }
        // amplitude form: ∂_τ^m exp(-μτ²/2 + τνβ*) at τ = 0
        let deriv = hermite_scaled(m, d.nu * beta.conj(), Complex64::new(2.0 * d.mu, 0.0)).expect("m <= 30")
            / 2f64.powi(m as i32);
        envelope.exp() * deriv.norm_sqr() / denom
    }
}

pub fn fock_amplitude(d: &DerivedParams, m: usize, n: usize) -> Result<Complex64> {
    Ok(ConditionalState::from_derived(*d, m)?.fock_amplitude(n))
}

pub fn pnd(d: &DerivedParams, m: usize, n: usize) -> Result<f64> {
    Ok(ConditionalState::from_derived(*d, m)?.pnd(n))
}

pub fn moments(d: &DerivedParams, m: usize, k: usize, l: usize) -> Result<Complex64> {
    ConditionalState::from_derived(*d, m)?.moments(k, l)
}

pub fn mean_photon(d: &DerivedParams, m: usize) -> Result<f64> {
    ConditionalState::from_derived(*d, m)?.mean_photon()
}

pub fn mandel_q(d: &DerivedParams, m: usize) -> Result<f64> {
    ConditionalState::from_derived(*d, m)?.mandel_q()
}

pub fn quad_wavefunction(d: &DerivedParams, m: usize, x: f64, phi: f64) -> Result<Complex64> {
    Ok(ConditionalState::from_derived(*d, m)?.quad_wavefunction(x, phi))
}

pub fn qcd(d: &DerivedParams, m: usize, x: f64, phi: f64) -> Result<f64> {
    Ok(ConditionalState::from_derived(*d, m)?.qcd(x, phi))
}

pub fn wigner(d: &DerivedParams, m: usize, x: f64, p: f64) -> Result<f64> {
    Ok(ConditionalState::from_derived(*d, m)?.wigner(x, p))
}

pub fn husimi(d: &DerivedParams, m: usize, x: f64, p: f64) -> Result<f64> {
    Ok(ConditionalState::from_derived(*d, m)?.husimi(x, p))
}
