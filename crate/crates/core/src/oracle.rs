//! Exact photon-number-basis construction of the heralded state.
//!
//! The two-mode squeezed vacuum is expanded in its Schmidt basis
//! `sech r Σ tanh^n r |n,n>`, each term is pushed through the beam splitter
//! `exp[θ(a†b - ab†)]` by combinatorial expansion inside its conserved
//! total-photon block, and mode `b` is projected onto `|m>`. Every observable
//! is then evaluated directly from the amplitude vector. Nothing here uses
//! the closed forms in [`crate::analytic`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::ModelParams;
use crate::specfun::{log_binomial, log_factorial, signed_log_pow, LogSum};
use crate::state::FockState;

/// Schmidt-sum cutoff for the two-mode squeezed vacuum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Largest Schmidt index `n` kept; the conditional state then reaches
    /// photon number `2 n_max - m`.
    pub n_max: usize,
    pub tail_tolerance: f64,
}

pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-14;
pub const MIN_N_MAX: usize = 64;
/// Hard ceiling on the auto-raised cutoff.
pub const MAX_N_MAX: usize = 20_000;

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { n_max: MIN_N_MAX, tail_tolerance: DEFAULT_TAIL_TOLERANCE }
    }
}

impl TruncationPolicy {
    pub fn with_n_max(n_max: usize) -> Self {
        TruncationPolicy { n_max, ..Default::default() }
    }

    /// Schmidt amplitude `sech r tanh^n r` of the last kept term. Linear
    /// observables such as the homodyne density see the dropped amplitudes,
    /// not their squares.
    pub fn tail(r: f64, n: usize) -> f64 {
        let t = r.tanh();
        if t == 0.0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        (n as f64 * t.ln()).exp() / r.cosh()
    }

    /// Raises `n_max` until `n_max >= m + 2` and the tail is below tolerance.
    pub fn resolve(&self, r: f64, m: usize) -> Result<usize> {
        if !(self.tail_tolerance > 0.0) {
            return Err(Error::invalid("tail_tolerance", self.tail_tolerance, "must be positive"));
        }
        let mut n = self.n_max.max(m + 2);
        while Self::tail(r, n) >= self.tail_tolerance {
            n += (n / 4).max(1);
            if n > MAX_N_MAX {
                return Err(Error::invalid("r", r, "Schmidt tail does not converge below the truncation ceiling"));
            }
        }
        Ok(n)
    }
}

/// `<k1, k2| B |j1, j2>` for `B = exp[θ(a†b - ab†)]`; zero unless
/// `k1 + k2 == j1 + j2`.
pub fn bs_matrix_element(theta: f64, j1: usize, j2: usize, k1: usize, k2: usize) -> f64 {
    if j1 + j2 != k1 + k2 {
        return 0.0;
    }
    let (s, c) = theta.sin_cos();
    // B|j1,j2> = (a†c - b†s)^j1 (a†s + b†c)^j2 |0,0> / sqrt(j1! j2!)
    // choose i factors a†c from the first bracket and k1 - i factors a†s from the second
    let lo = k1.saturating_sub(j2);
    let hi = j1.min(k1);
    let norm = 0.5 * (log_factorial(k1 as u64) + log_factorial(k2 as u64)
        - log_factorial(j1 as u64)
        - log_factorial(j2 as u64));
    let term_log = |i: usize| {
        let (sc, lc) = signed_log_pow(c, (i + j2 + i - k1) as u64);
        let (ss, ls) = signed_log_pow(s, (j1 - i + k1 - i) as u64);
        let sign = if (j1 - i) % 2 == 1 { -1.0 } else { 1.0 } * sc * ss;
        let lb = log_binomial(j1 as u64, i as u64) + log_binomial(j2 as u64, (k1 - i) as u64);
        (sign, lb + lc + ls + norm)
    };
    if c == 0.0 || s == 0.0 || hi - lo > 64 {
        let mut sum = LogSum::new();
        for i in lo..=hi {
            let (sign, l) = term_log(i);
            sum.add(sign, l);
        }
        return sum.value();
    }
    // short sums: one log-domain term, then exact-ratio steps with compensated summation
    let ratio = (c / s) * (c / s);
    let (sign0, log0) = term_log(lo);
    let mut t = 1.0f64;
    let (mut acc, mut comp) = (1.0f64, 0.0f64);
    for i in lo..hi {
        t *= -((j1 - i) as f64 / (i + 1) as f64) * ((k1 - i) as f64 / (j2 + i + 1 - k1) as f64) * ratio;
        let next = acc + t;
        comp += if acc.abs() >= t.abs() { (acc - next) + t } else { (t - next) + acc };
        acc = next;
    }
    sign0 * log0.exp() * (acc + comp)
}

/// Full `(N+1) x (N+1)` beam-splitter block for total photon number `N`,
/// indexed `[k1][j1]` for `<k1, N-k1| B |j1, N-j1>`.
///
/// Exponentiates the tridiagonal generator `θ(a†b - ab†)` restricted to the
/// block by scaling and squaring. Used for whole-block checks, where the
/// explicit sum in [`bs_matrix_element`] loses digits to cancellation.
pub fn bs_block(theta: f64, total: usize) -> Vec<Vec<f64>> {
    let dim = total + 1;
    let mut g = vec![0.0; dim * dim];
    for k in 0..dim {
        let l = total - k;
        if l > 0 {
            g[(k + 1) * dim + k] += theta * (((k + 1) * l) as f64).sqrt();
        }
        if k > 0 {
            g[(k - 1) * dim + k] -= theta * ((k * (l + 1)) as f64).sqrt();
        }
    }
    let norm = (0..dim)
        .map(|i| (0..dim).map(|j| g[i * dim + j].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = 0.5f64.powi(squarings as i32);
    g.iter_mut().for_each(|v| *v *= scale);

    let mul = |a: &[f64], b: &[f64]| {
        let mut out = vec![0.0; dim * dim];
        for i in 0..dim {
            for k in 0..dim {
                let aik = a[i * dim + k];
                if aik == 0.0 {
                    continue;
                }
                let row = &b[k * dim..(k + 1) * dim];
                for (o, bkj) in out[i * dim..(i + 1) * dim].iter_mut().zip(row) {
                    *o += aik * bkj;
                }
            }
        }
        out
    };
    let mut result = vec![0.0; dim * dim];
    let mut term = vec![0.0; dim * dim];
    for i in 0..dim {
        result[i * dim + i] = 1.0;
        term[i * dim + i] = 1.0;
    }
    // ||g|| <= 0.5 after scaling: 20 Taylor terms reach 0.5^20/20! << eps
    for k in 1..=20 {
        term = mul(&term, &g);
        let inv = 1.0 / k as f64;
        term.iter_mut().for_each(|v| *v *= inv);
        result.iter_mut().zip(&term).for_each(|(r, t)| *r += t);
    }
    for _ in 0..squarings {
        result = mul(&result, &result);
    }
    result.chunks(dim).map(|row| row.to_vec()).collect()
}

/// `<k, m| B |n, n>`, the only beam-splitter elements a Schmidt term needs.
pub fn bs_fock_amplitude(theta: f64, n: usize, k: usize, m: usize) -> f64 {
    if k + m != 2 * n {
        return 0.0;
    }
    bs_matrix_element(theta, n, n, k, m)
}

/// Unnormalized heralded amplitudes `_b<m| B |TMSV>` for photon numbers
/// `0..=2 n_max - m`.
pub fn unnormalized_amplitudes(p: &ModelParams, policy: &TruncationPolicy) -> Result<Vec<f64>> {
    p.validate()?;
    let n_max = policy.resolve(p.r, p.m)?;
    let t = p.r.tanh();
    let log_sech = -p.r.cosh().ln();
    let len = 2 * n_max - p.m + 1;
    let mut out = vec![0.0; len];
    for (k, slot) in out.iter_mut().enumerate() {
        if (k + p.m) % 2 == 1 {
            continue;
        }
        let n = (k + p.m) / 2;
        let (st, lt) = signed_log_pow(t, n as u64);
        if st == 0.0 {
            continue;
        }
        *slot = (lt + log_sech).exp() * bs_fock_amplitude(p.theta, n, k, p.m);
    }
    Ok(out)
}

/// Normalized heralded state and the probability of the heralding event.
pub fn conditional_amplitudes(p: &ModelParams, policy: &TruncationPolicy) -> Result<(FockState, f64)> {
    let raw = unnormalized_amplitudes(p, policy)?;
    let p_event: f64 = raw.iter().map(|a| a * a).sum();
    if p_event < 1e-300 {
        return Err(Error::ZeroProbability(format!(
            "no amplitude for m = {} at theta = {}, r = {}",
            p.m, p.theta, p.r
        )));
    }
    // trailing amplitudes below 1e-20 of the peak carry no information at double precision
    let peak = raw.iter().fold(0.0f64, |acc, a| acc.max(a.abs()));
    let keep = raw.iter().rposition(|a| a.abs() > 1e-20 * peak).unwrap_or(0) + 1;
    let keep = keep.max(p.m + 1).min(raw.len());
    let amps = raw[..keep].iter().map(|&a| Complex64::new(a, 0.0)).collect();
    let state = FockState::from_unnormalized(amps, p.m)?;
    Ok((state, p_event))
}

pub fn oracle_pnd(state: &FockState, n: usize) -> f64 {
    state.amplitude(n).norm_sqr()
}

/// `<a^k a†^l>` from amplitudes.
pub fn oracle_moments(state: &FockState, k: usize, l: usize) -> Complex64 {
    let c = state.amplitudes();
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, cn) in c.iter().enumerate() {
        if n + l < k {
            continue;
        }
        let target = n + l - k;
        let Some(ct) = c.get(target) else { continue };
        let lf = log_factorial((n + l) as u64);
        let w = (lf - 0.5 * log_factorial(n as u64) - 0.5 * log_factorial(target as u64)).exp();
        acc += ct.conj() * cn * w;
    }
    acc
}

pub fn oracle_mean(state: &FockState) -> f64 {
    oracle_moments(state, 1, 1).re - 1.0
}

/// Mandel Q from the anti-normally ordered moments.
pub fn oracle_q(state: &FockState) -> Result<f64> {
    let aad = oracle_moments(state, 1, 1).re;
    let a2ad2 = oracle_moments(state, 2, 2).re;
    let mean = aad - 1.0;
    if mean.abs() < 1e-14 {
        return Err(Error::UndefinedMandelQ);
    }
    Ok((a2ad2 - aad * aad - 2.0 * aad + 1.0) / mean)
}

/// Harmonic-oscillator eigenfunctions `π^{-1/4} e^{-x²/2} H_n(x) / sqrt(2^n n!)`
/// for `n = 0..len`, by their normalized three-term recurrence.
pub(crate) fn hermite_functions(x: f64, len: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-0.5 * x * x).exp());
    if len > 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for n in 1..len.saturating_sub(1) {
        let nf = n as f64;
        let next = (2.0 / (nf + 1.0)).sqrt() * x * out[n] - (nf / (nf + 1.0)).sqrt() * out[n - 1];
        out.push(next);
    }
    out
}

/// Homodyne density `|<x,φ|ψ>|²`, with `<x,φ|n> = ψ_n(x) e^{-inφ}`.
pub fn oracle_qcd(state: &FockState, x: f64, phi: f64) -> f64 {
    let c = state.amplitudes();
    let basis = hermite_functions(x, c.len());
    c.iter()
        .zip(&basis)
        .enumerate()
        .map(|(n, (cn, hn))| cn * hn * Complex64::from_polar(1.0, -(n as f64) * phi))
        .sum::<Complex64>()
        .norm_sqr()
}

/// Wigner function `W = (2/π) <ψ| D(2α) Π |ψ>` with `α = (x + ip)/√2`,
/// normalized so that `∫ W d²α = 1`.
///
/// Displacement elements use the Laguerre recurrence in the scaled form
/// `h_n = sqrt(n!/(n+d)!) |β|^d e^{-|β|²/2} L_n^{(d)}(|β|²)`.
pub fn oracle_wigner(state: &FockState, x: f64, p: f64) -> f64 {
    let c = state.amplitudes();
    let len = c.len();
    let beta = Complex64::new(x, p) * 2f64.sqrt();
    let b2 = beta.norm_sqr();
    let (bmag, bphase) = (beta.norm(), beta.arg());
    let mut total = 0.0;
    for d in 0..len {
        // the state has definite parity, so odd offsets vanish identically
        if d % 2 == 1 && parity_definite(c) {
            continue;
        }
        let log_h0 = if d == 0 {
            -0.5 * b2
        } else if bmag == 0.0 {
            f64::NEG_INFINITY
        } else {
            d as f64 * bmag.ln() - 0.5 * b2 - 0.5 * log_factorial(d as u64)
        };
        let phase = Complex64::from_polar(1.0, d as f64 * bphase);
        let df = d as f64;
        let mut h_prev = 0.0;
        let mut h = log_h0.exp();
        let mut partial = 0.0;
        for n in 0..len - d {
            let term = c[n + d].conj() * c[n] * if d == 0 { Complex64::new(1.0, 0.0) } else { phase };
            let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
            partial += sign * term.re * h;
            let nf = n as f64;
            let next = ((2.0 * nf + 1.0 + df - b2) * h - (nf * (nf + df)).sqrt() * h_prev)
                / ((nf + 1.0) * (nf + df + 1.0)).sqrt();
            h_prev = h;
            h = next;
        }
        total += if d == 0 { partial } else { 2.0 * partial };
    }
    2.0 / PI * total
}

fn parity_definite(c: &[Complex64]) -> bool {
    let zero = Complex64::new(0.0, 0.0);
    c.iter().step_by(2).all(|v| *v == zero) || c.iter().skip(1).step_by(2).all(|v| *v == zero)
}

/// Husimi function `|<β|ψ>|² / π` with `β = (x + ip)/√2`.
pub fn oracle_husimi(state: &FockState, x: f64, p: f64) -> f64 {
    let beta = Complex64::new(x, p) / 2f64.sqrt();
    let bc = beta.conj();
    let mut basis = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    let mut acc = Complex64::new(0.0, 0.0);
    for (n, cn) in state.amplitudes().iter().enumerate() {
        if n > 0 {
            basis *= bc / (n as f64).sqrt();
        }
        acc += cn * basis;
    }
    acc.norm_sqr() / PI
}
