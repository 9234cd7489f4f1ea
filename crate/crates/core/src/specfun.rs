//! Orthogonal polynomials of complex argument and factorial helpers.
//!
//! Hermite polynomials follow the physicists' convention
//! `H_m(x) = d^m/dt^m exp(2xt - t^2) |_{t=0}`.

use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type ComplexValue = Complex64;

/// Highest polynomial order accepted by [`hermite`] and [`legendre`].
pub const MAX_ORDER: usize = 60;

/// Largest argument accepted by [`log_factorial`].
pub const MAX_LOG_FACTORIAL: u64 = 1_000_000;

fn check(m: usize, z: Complex64, op: &'static str) -> Result<()> {
    if m > MAX_ORDER {
        return Err(Error::UnsupportedOrder { order: m, max: MAX_ORDER });
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::NonFinite(op));
    }
    Ok(())
}

/// Physicists' Hermite polynomial `H_m(z)`.
pub fn hermite(m: usize, z: Complex64) -> Result<Complex64> {
    check(m, z, "hermite")?;
    let mut prev = Complex64::new(1.0, 0.0);
    if m == 0 {
        return Ok(prev);
    }
    let mut cur = 2.0 * z;
    for k in 1..m {
        let next = 2.0 * z * cur - 2.0 * k as f64 * prev;
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Legendre polynomial `P_m(z)`.
pub fn legendre(m: usize, z: Complex64) -> Result<Complex64> {
    check(m, z, "legendre")?;
    let mut prev = Complex64::new(1.0, 0.0);
    if m == 0 {
        return Ok(prev);
    }
    let mut cur = z;
    for k in 1..m {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * z * cur - kf * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// `q^{m/2} H_m(w / sqrt(q))` written as the polynomial
/// `m! Σ_j (-q)^j (2w)^{m-2j} / (j! (m-2j)!)`, which stays finite at `q = 0`
/// and does not depend on the branch of `sqrt(q)`.
pub fn hermite_scaled(m: usize, w: Complex64, q: Complex64) -> Result<Complex64> {
    check(m, w, "hermite_scaled")?;
    if !(q.re.is_finite() && q.im.is_finite()) {
        return Err(Error::NonFinite("hermite_scaled"));
    }
    let lm = log_factorial(m as u64);
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..=m / 2 {
        let c = (lm - log_factorial(j as u64) - log_factorial((m - 2 * j) as u64)).exp();
        acc += c * (-q).powu(j as u32) * (2.0 * w).powu((m - 2 * j) as u32);
    }
    Ok(acc)
}

const TABLE_LEN: usize = 1024;

fn table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = Vec::with_capacity(TABLE_LEN);
        t.push(0.0);
        let mut acc = 0.0f64;
        for k in 1..TABLE_LEN {
            acc += (k as f64).ln();
            t.push(acc);
        }
        t
    })
}

/// `ln(n!)`.
///
/// Tabulated below 1024, Stirling series above (truncation error < 1e-20 there).
///
/// # Panics
/// If `n` exceeds [`MAX_LOG_FACTORIAL`].
pub fn log_factorial(n: u64) -> f64 {
    assert!(n <= MAX_LOG_FACTORIAL, "log_factorial: n = {n} above cap");
    if (n as usize) < TABLE_LEN {
        return table()[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `ln C(n, k)`; `-inf` when `k > n`.
pub fn log_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    log_factorial(n) - log_factorial(k) - log_factorial(n - k)
}

/// Exact binomial coefficient, `None` on `u128` overflow.
pub fn binomial_exact(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Signed log-magnitude accumulator: sums terms given as `sign * exp(log_mag)`
/// without overflowing intermediate factorials.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LogSum {
    scale: f64,
    acc: f64,
}

impl LogSum {
    pub(crate) fn new() -> Self {
        LogSum { scale: f64::NEG_INFINITY, acc: 0.0 }
    }

    pub(crate) fn add(&mut self, sign: f64, log_mag: f64) {
        if sign == 0.0 || log_mag == f64::NEG_INFINITY {
            return;
        }
        if log_mag > self.scale {
            self.acc *= (self.scale - log_mag).exp();
            self.scale = log_mag;
        }
        self.acc += sign * (log_mag - self.scale).exp();
    }

    /// Returns `(sign, log|sum|)`.
    pub(crate) fn finish(self) -> (f64, f64) {
        if self.acc == 0.0 {
            (0.0, f64::NEG_INFINITY)
        } else {
            (self.acc.signum(), self.scale + self.acc.abs().ln())
        }
    }

    pub(crate) fn value(self) -> f64 {
        let (s, l) = self.finish();
        s * l.exp()
    }
}

/// `x^p` as `(sign, ln|x^p|)`, with `0^0 = 1`.
pub(crate) fn signed_log_pow(x: f64, p: u64) -> (f64, f64) {
    if p == 0 {
        return (1.0, 0.0);
    }
    if x == 0.0 {
        return (0.0, f64::NEG_INFINITY);
    }
    let sign = if x < 0.0 && p % 2 == 1 { -1.0 } else { 1.0 };
    (sign, p as f64 * x.abs().ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Explicit monomial expansion
    /// `H_m(z) = m! sum_j (-1)^j (2z)^(m-2j) / (j! (m-2j)!)`.
    fn hermite_monomial(m: usize, z: Complex64) -> Complex64 {
        let mut fact = vec![1.0f64; m + 1];
        for i in 1..=m {
            fact[i] = fact[i - 1] * i as f64;
        }
        let mut s = Complex64::new(0.0, 0.0);
        for j in 0..=m / 2 {
            let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
            s += sign * (2.0 * z).powu((m - 2 * j) as u32) / (fact[j] * fact[m - 2 * j]);
        }
        s * fact[m]
    }

    /// Two-variable dense series exp(-t^2 - tau^2 + c t tau), truncated to
    /// exponents <= m in each variable; returns the t^m tau^m coefficient.
    fn legendre_generating_coefficient(m: usize, cross: Complex64) -> Complex64 {
        let n = m + 1;
        let idx = |i: usize, j: usize| i * n + j;
        let mut q = vec![Complex64::new(0.0, 0.0); n * n];
        if m >= 2 {
            q[idx(2, 0)] = c(-1.0, 0.0);
            q[idx(0, 2)] = c(-1.0, 0.0);
        }
        if m >= 1 {
            q[idx(1, 1)] = cross;
        }
        let mul = |a: &[Complex64], b: &[Complex64]| {
            let mut out = vec![Complex64::new(0.0, 0.0); n * n];
            for i in 0..n {
                for j in 0..n {
                    if a[idx(i, j)] == c(0.0, 0.0) {
                        continue;
                    }
                    for k in 0..n - i {
                        for l in 0..n - j {
                            out[idx(i + k, j + l)] += a[idx(i, j)] * b[idx(k, l)];
                        }
                    }
                }
            }
            out
        };
        let mut total = vec![Complex64::new(0.0, 0.0); n * n];
        total[0] = c(1.0, 0.0);
        let mut power = total.clone();
        for p in 1..=m {
            power = mul(&power, &q).into_iter().map(|v| v / p as f64).collect();
            for (t, v) in total.iter_mut().zip(&power) {
                *t += *v;
            }
        }
        total[idx(m, m)]
    }

    #[test]
    fn hermite_low_orders() {
        let z = c(0.3, -1.7);
        assert_eq!(hermite(0, z).unwrap(), c(1.0, 0.0));
        assert_eq!(hermite(1, z).unwrap(), 2.0 * z);
        let h3 = hermite(3, c(1.0, 0.0)).unwrap();
        assert!((h3 - c(-4.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn legendre_low_orders() {
        let z = c(0.3, -1.7);
        assert_eq!(legendre(0, z).unwrap(), c(1.0, 0.0));
        assert_eq!(legendre(1, z).unwrap(), z);
        let p2 = legendre(2, c(0.5, 0.0)).unwrap();
        assert!((p2 - c(-0.125, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn order_cap_and_non_finite() {
        assert_eq!(
            hermite(61, c(1.0, 0.0)),
            Err(Error::UnsupportedOrder { order: 61, max: 60 })
        );
        assert!(matches!(legendre(70, c(0.0, 0.0)), Err(Error::UnsupportedOrder { .. })));
        assert!(matches!(hermite(60, c(0.1, 0.0)), Ok(_)));
        assert_eq!(hermite(2, c(f64::NAN, 0.0)), Err(Error::NonFinite("hermite")));
        assert_eq!(legendre(2, c(0.0, f64::INFINITY)), Err(Error::NonFinite("legendre")));
    }

    #[test]
    fn hermite_matches_monomial_expansion() {
        for m in 0..=10 {
            for &z in &[c(0.0, 0.0), c(1.3, 0.0), c(-0.4, 2.2), c(3.0, -1.0)] {
                let got = hermite(m, z).unwrap();
                let want = hermite_monomial(m, z);
                assert!(
                    (got - want).norm() <= 1e-10 * want.norm().max(1.0),
                    "m={m} z={z} got={got} want={want}"
                );
            }
        }
    }

    #[test]
    fn legendre_generating_identity() {
        // coef[t^m tau^m] * m! m! of exp(-t^2 - tau^2 + 2x/sqrt(x^2-1) t tau)
        //   = 2^m m! / (x^2-1)^(m/2) P_m(x)
        for &x in &[c(1.5, 0.0), c(2.0, 0.5)] {
            let root = (x * x - 1.0).sqrt();
            for m in 0..=6usize {
                let fact: f64 = (1..=m).map(|i| i as f64).product();
                let lhs = legendre_generating_coefficient(m, 2.0 * x / root) * fact * fact;
                let rhs = 2f64.powi(m as i32) * fact / root.powu(m as u32) * legendre(m, x).unwrap();
                assert!((lhs - rhs).norm() <= 1e-10 * rhs.norm(), "x={x} m={m}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn scaled_hermite_matches_hermite() {
        for m in 0..=12 {
            for &(w, q) in &[(c(0.4, -0.2), c(0.9, 0.0)), (c(-1.5, 0.3), c(0.2, 0.7)), (c(2.0, 0.0), c(3.0, -1.0))] {
                let root = q.sqrt();
                let want = root.powu(m as u32) * hermite(m, w / root).unwrap();
                let got = hermite_scaled(m, w, q).unwrap();
                assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0), "m={m}");
                // other branch of the root gives the same value
                let other = (-root).powu(m as u32) * hermite(m, w / -root).unwrap();
                assert!((got - other).norm() <= 1e-12 * want.norm().max(1.0));
            }
        }
        assert_eq!(hermite_scaled(3, c(0.5, 0.0), c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn log_factorial_values() {
        assert_eq!(log_factorial(0), 0.0);
        assert_eq!(log_factorial(1), 0.0);
        let want = 3_628_800f64.ln();
        assert!((log_factorial(10) - want).abs() <= 1e-14 * want);
        // continuity across the table / Stirling boundary
        let exact: f64 = (1..=1500u64).map(|k| (k as f64).ln()).sum();
        assert!((log_factorial(1500) - exact).abs() <= 1e-13 * exact);
        let from_table = log_factorial(1023) + (1024f64).ln();
        assert!((log_factorial(1024) - from_table).abs() <= 1e-14 * from_table);
    }

    #[test]
    fn exact_binomials() {
        assert_eq!(binomial_exact(10, 3), Some(120));
        assert_eq!(binomial_exact(5, 7), Some(0));
        assert_eq!(binomial_exact(60, 30), Some(118_264_581_564_861_424));
        assert!((log_binomial(60, 30) - 118_264_581_564_861_424f64.ln()).abs() < 1e-13 * 40.0);
        assert_eq!(binomial_exact(200, 100), None);
    }

    #[test]
    fn log_sum_handles_cancellation_and_scale() {
        let mut s = LogSum::new();
        s.add(1.0, 800.0);
        s.add(1.0, 800.0);
        let (sign, log) = s.finish();
        assert_eq!(sign, 1.0);
        assert!((log - 800.0 - 2f64.ln()).abs() < 1e-13);
        let mut s = LogSum::new();
        s.add(1.0, 2f64.ln());
        s.add(-1.0, 3f64.ln());
        assert!((s.value() + 1.0).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn polynomial_parity(m in 0usize..=20, re in -5.0f64..5.0, im in -5.0f64..5.0) {
            let z = c(re, im);
            if z.norm() <= 5.0 {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let h = hermite(m, z).unwrap();
                let hm = hermite(m, -z).unwrap();
                prop_assert!((hm - sign * h).norm() <= 1e-10 * h.norm().max(1e-300));
                let p = legendre(m, z).unwrap();
                let pm = legendre(m, -z).unwrap();
                prop_assert!((pm - sign * p).norm() <= 1e-10 * p.norm().max(1e-300));
            }
        }
    }
}
