//! Experiment knobs and the derived symbol set shared by every closed form.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest heralded photon count accepted.
pub const MAX_M: usize = 30;

/// Angles this close to 0, π/4 or π/2 are treated as the exact special point.
pub const SPECIAL_ANGLE_TOL: f64 = 4.0 * f64::EPSILON;

/// Below this `|B3|` the Legendre normalization is degenerate.
pub const B3_DEGENERATE: f64 = 1e-300;

/// Beam-splitter angle, two-mode squeezing and heralded photon count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Beam-splitter angle in radians, `[0, π/2]`. Transmittance is `cos θ`.
    pub theta: f64,
    /// Two-mode squeezing parameter, `r >= 0`.
    pub r: f64,
    /// Number of photons detected in the heralding mode.
    pub m: usize,
}

impl ModelParams {
    pub fn new(theta: f64, r: f64, m: usize) -> Result<Self> {
        let p = ModelParams { theta, r, m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.theta.is_finite() || !(0.0..=FRAC_PI_2).contains(&self.theta) {
            return Err(Error::invalid("theta", self.theta, "must lie in [0, pi/2]"));
        }
        if !self.r.is_finite() || self.r < 0.0 {
            return Err(Error::invalid("r", self.r, "must be finite and non-negative"));
        }
        if self.m > MAX_M {
            return Err(Error::invalid("m", self.m, format!("must not exceed {MAX_M}")));
        }
        Ok(())
    }

    pub fn with_m(self, m: usize) -> Self {
        ModelParams { m, ..self }
    }
}

/// Symbols derived once from `(θ, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub theta: f64,
    pub r: f64,
    pub tanh_r: f64,
    pub cosh_r: f64,
    /// `sin 2θ tanh r`
    pub mu: f64,
    /// `cos 2θ tanh r`
    pub nu: f64,
    /// Conditional squeezing, `tanh λ = μ`.
    pub lambda: f64,
    /// `1 - μ²`
    pub a: f64,
    /// `μ / (A cosh² r)`
    pub b1: f64,
    /// `ν² / A`
    pub b2: f64,
    /// `(tanh⁴ r - μ²) / A`, may be negative.
    pub b3: f64,
    /// `ν⁴ / (A² B3)`; `None` where `|B3|` is degenerate.
    pub b4: Option<f64>,
    /// `(1 + μ²) / (1 - μ²)`
    pub xi: f64,
}

impl DerivedParams {
    /// `μ == 0` exactly (total transmission or total reflection).
    pub fn is_fock_limit(&self) -> bool {
        self.mu == 0.0
    }

    /// `ν == 0` exactly (balanced beam splitter).
    pub fn is_balanced(&self) -> bool {
        self.nu == 0.0
    }
}

/// `(sin 2θ, cos 2θ)` with the special angles snapped to exact values.
fn double_angle(theta: f64) -> (f64, f64) {
    if theta <= SPECIAL_ANGLE_TOL {
        (0.0, 1.0)
    } else if (theta - FRAC_PI_4).abs() <= SPECIAL_ANGLE_TOL {
        (1.0, 0.0)
    } else if (FRAC_PI_2 - theta).abs() <= SPECIAL_ANGLE_TOL {
        (0.0, -1.0)
    } else {
        (2.0 * theta).sin_cos()
    }
}

/// Computes every derived symbol; rejects out-of-range inputs naming the field.
pub fn derive(p: &ModelParams) -> Result<DerivedParams> {
    p.validate()?;
    let (s2, c2) = double_angle(p.theta);
    let tanh_r = p.r.tanh();
    let cosh_r = p.r.cosh();
    let mu = s2 * tanh_r;
    let nu = c2 * tanh_r;
    let a = 1.0 - mu * mu;
    let b1 = mu / (a * cosh_r * cosh_r);
    let b2 = nu * nu / a;
    // tanh⁴ r - μ² = tanh² r (tanh r - sin 2θ)(tanh r + sin 2θ)
    let b3 = tanh_r * tanh_r * (tanh_r - s2) * (tanh_r + s2) / a;
    let b4 = (b3.abs() >= B3_DEGENERATE).then(|| b2 * b2 / b3);
    Ok(DerivedParams {
        theta: p.theta,
        r: p.r,
        tanh_r,
        cosh_r,
        mu,
        nu,
        lambda: mu.atanh(),
        a,
        b1,
        b2,
        b3,
        b4,
        xi: (1.0 + mu * mu) / a,
    })
}

/// Complex auxiliaries of the homodyne wavefunction at local-oscillator phase `φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseParams {
    pub phi: f64,
    /// `1 + μ e^{-2iφ}`
    pub theta_c: Complex64,
    /// `(1 - μ e^{-2iφ}) / Θ`
    pub pi_c: Complex64,
    /// `(μ + e^{-2iφ} tanh² r) / Θ`
    pub gamma_c: Complex64,
    /// `e^{-iφ} ν / Θ`
    pub delta_c: Complex64,
}

pub fn phase_params(d: &DerivedParams, phi: f64) -> PhaseParams {
    let e1 = Complex64::from_polar(1.0, -phi);
    let e2 = e1 * e1;
    let theta_c = 1.0 + d.mu * e2;
    PhaseParams {
        phi,
        theta_c,
        pi_c: (1.0 - d.mu * e2) / theta_c,
        gamma_c: (d.mu + e2 * d.tanh_r * d.tanh_r) / theta_c,
        delta_c: e1 * d.nu / theta_c,
    }
}

/// `R = 2ν(α - μα*) / A`, the linear coefficient in the Wigner closed form.
pub fn wigner_aux(d: &DerivedParams, alpha: Complex64) -> Complex64 {
    2.0 * d.nu * (alpha - d.mu * alpha.conj()) / d.a
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn balanced_splitter() {
        for &r in &[0.1, 0.5, 2.0] {
            let d = derive(&ModelParams::new(FRAC_PI_4, r, 2).unwrap()).unwrap();
            assert_eq!(d.nu, 0.0);
            assert_eq!(d.mu, r.tanh());
            assert!(d.is_balanced());
        }
    }

    #[test]
    fn transmission_and_reflection_limits() {
        let r = 0.7;
        for &(theta, sign) in &[(0.0, 1.0), (FRAC_PI_2, -1.0)] {
            let d = derive(&ModelParams::new(theta, r, 1).unwrap()).unwrap();
            assert_eq!(d.mu, 0.0);
            assert_eq!(d.nu, sign * r.tanh());
            assert_eq!(d.a, 1.0);
            assert_eq!(d.b1, 0.0);
            assert_eq!(d.b2, r.tanh().powi(2));
            assert!(close(d.b3, r.tanh().powi(4), 1e-15));
            assert!(close(d.b4.unwrap(), 1.0, 1e-15));
            assert!(d.is_fock_limit());
        }
    }

    #[test]
    fn extended_precision_reference() {
        // 40-digit re-evaluation of the defining formulas at θ = π/7, r = 0.5
        let d = derive(&ModelParams::new(PI / 7.0, 0.5, 1).unwrap()).unwrap();
        let want = [
            (d.mu, 0.36129774213450509354),
            (d.nu, 0.28812533481556468756),
            (d.lambda, 0.37837767512523866314),
            (d.a, 0.86946394152850866282),
            (d.b1, 0.32680112038674245487),
            (d.b2, 0.095479760111315958904),
            (d.b3, -0.097682587695115692864),
            (d.b4.unwrap(), -0.093326608211570524471),
            (d.xi, 1.3002679058593511987),
        ];
        for (i, (got, exp)) in want.iter().enumerate() {
            assert!((got - exp).abs() <= 1e-15 * exp.abs().max(1.0) * 4.0, "field {i}: {got} vs {exp}");
        }
    }

    #[test]
    fn phase_params_reference() {
        let d = derive(&ModelParams::new(PI / 7.0, 0.5, 1).unwrap()).unwrap();
        let pp = phase_params(&d, PI / 3.0);
        let want = [
            (pp.theta_c, Complex64::new(0.81935112893274745323, -0.31289302301844076576)),
            (pp.pi_c, Complex64::new(1.1302920344228092194, 0.81351387826960318175)),
            (pp.gamma_c, Complex64::new(0.34632899275928729883, -0.093461472230625823263)),
            (pp.delta_c, Complex64::new(0.25494333771873093052, -0.20718085542649497244)),
        ];
        for (got, exp) in want {
            assert!((got - exp).norm() < 1e-15, "{got} vs {exp}");
        }
        let r = wigner_aux(&d, Complex64::new(1.0, 1.0));
        assert!((r - Complex64::new(0.42330979608294395554, 0.90222112499950283865)).norm() < 1e-15);
    }

    #[test]
    fn phase_params_special_cases() {
        let d = derive(&ModelParams::new(0.0, 0.8, 1).unwrap()).unwrap();
        let phi = 0.37;
        let pp = phase_params(&d, phi);
        assert_eq!(pp.theta_c, Complex64::new(1.0, 0.0));
        assert_eq!(pp.pi_c, Complex64::new(1.0, 0.0));
        let t2 = 0.8f64.tanh().powi(2);
        assert!((pp.gamma_c - Complex64::from_polar(t2, -2.0 * phi)).norm() < 1e-15);
        assert!((pp.delta_c - Complex64::from_polar(d.nu, -phi)).norm() < 1e-15);

        let d = derive(&ModelParams::new(0.3, 0.8, 1).unwrap()).unwrap();
        let pp = phase_params(&d, 0.0);
        assert_eq!(pp.theta_c, Complex64::new(1.0 + d.mu, 0.0));
    }

    #[test]
    fn wigner_aux_zeros() {
        let d = derive(&ModelParams::new(0.4, 0.8, 1).unwrap()).unwrap();
        assert_eq!(wigner_aux(&d, Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
        let d = derive(&ModelParams::new(FRAC_PI_4, 0.8, 1).unwrap()).unwrap();
        assert_eq!(wigner_aux(&d, Complex64::new(1.2, -0.3)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn validation_names_the_field() {
        let err = ModelParams::new(2.0, 0.5, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "theta", .. }));
        let err = ModelParams::new(0.5, -0.1, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "r", .. }));
        let err = ModelParams::new(0.5, f64::INFINITY, 1).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "r", .. }));
        let err = ModelParams::new(0.5, 0.5, 31).unwrap_err();
        assert!(matches!(err, Error::InvalidParameter { name: "m", .. }));
        let bad = ModelParams { theta: -0.1, r: 0.5, m: 0 };
        assert!(derive(&bad).is_err());
    }

    #[test]
    fn b3_sign_change_at_sin2theta_eq_tanh_r() {
        let r: f64 = 0.6;
        let b3 = |theta: f64| derive(&ModelParams::new(theta, r, 1).unwrap()).unwrap().b3;
        let (mut lo, mut hi) = (1e-6, FRAC_PI_4 - 1e-6);
        assert!(b3(lo) > 0.0 && b3(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if b3(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let root = 0.5 * r.tanh().asin();
        assert!((lo - root).abs() < 1e-10, "{lo} vs {root}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn derived_invariants(theta in 0.0..=FRAC_PI_2, r in 0.0f64..4.0) {
            let d = derive(&ModelParams::new(theta, r, 0).unwrap()).unwrap();
            let t2 = r.tanh().powi(2);
            prop_assert!((d.mu * d.mu + d.nu * d.nu - t2).abs() <= 1e-13);
            prop_assert!(d.a > 0.0 && d.a <= 1.0);
            prop_assert!((d.lambda.tanh() - d.mu).abs() <= 1e-14);
            prop_assert!(d.xi >= 1.0);
            let mirror = derive(&ModelParams::new(FRAC_PI_2 - theta, r, 0).unwrap()).unwrap();
            prop_assert!((mirror.mu - d.mu).abs() <= 1e-15);
            prop_assert!((mirror.nu + d.nu).abs() <= 1e-15);
        }
    }
}
