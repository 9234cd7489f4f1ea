//! Dense truncated power series in four variables `(s, τ, x, y)`.
//!
//! Exponents live in the box `[0, ds] x [0, dt] x [0, dx] x [0, dy]`; any
//! product term leaving the box is dropped, which is exact for reading off
//! coefficients inside it.

#[derive(Debug, Clone)]
pub(crate) struct Series4 {
    dims: [usize; 4],
    coef: Vec<f64>,
}

/// A single monomial `c · s^e0 τ^e1 x^e2 y^e3`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Monomial {
    pub exps: [usize; 4],
    pub coef: f64,
}

impl Series4 {
    pub(crate) fn one(max_exps: [usize; 4]) -> Self {
        let dims = max_exps.map(|d| d + 1);
        let mut coef = vec![0.0; dims.iter().product()];
        coef[0] = 1.0;
        Series4 { dims, coef }
    }

    fn index(&self, e: [usize; 4]) -> usize {
        ((e[0] * self.dims[1] + e[1]) * self.dims[2] + e[2]) * self.dims[3] + e[3]
    }

    pub(crate) fn get(&self, e: [usize; 4]) -> f64 {
        if e.iter().zip(&self.dims).any(|(x, d)| x >= d) {
            return 0.0;
        }
        self.coef[self.index(e)]
    }

    /// `self * poly * scale`, truncated to the box.
    pub(crate) fn mul_poly(&self, poly: &[Monomial], scale: f64) -> Series4 {
        let mut out = Series4 { dims: self.dims, coef: vec![0.0; self.coef.len()] };
        let [d0, d1, d2, d3] = self.dims;
        for a in 0..d0 {
            for b in 0..d1 {
                for c in 0..d2 {
                    for d in 0..d3 {
                        let v = self.coef[self.index([a, b, c, d])];
                        if v == 0.0 {
                            continue;
                        }
                        for mono in poly {
                            let e = [a + mono.exps[0], b + mono.exps[1], c + mono.exps[2], d + mono.exps[3]];
                            if e.iter().zip(&self.dims).any(|(x, dd)| x >= dd) {
                                continue;
                            }
                            let i = out.index(e);
                            out.coef[i] += v * mono.coef * scale;
                        }
                    }
                }
            }
        }
        out
    }

    /// Coefficient at `target` of `exp(q)` for a homogeneous quadratic `q`.
    ///
    /// Only `q^j / j!` with `2j` equal to the total degree of `target`
    /// contributes.
    pub(crate) fn exp_quadratic_coefficient(q: &[Monomial], target: [usize; 4]) -> f64 {
        let degree: usize = target.iter().sum();
        if degree % 2 == 1 {
            return 0.0;
        }
        let mut power = Series4::one(target);
        for j in 1..=degree / 2 {
            power = power.mul_poly(q, 1.0 / j as f64);
        }
        power.get(target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_of_single_cross_term() {
        // exp(c s τ): coefficient of s^3 τ^3 is c^3 / 3!
        let q = [Monomial { exps: [1, 1, 0, 0], coef: 0.7 }];
        let got = Series4::exp_quadratic_coefficient(&q, [3, 3, 0, 0]);
        assert!((got - 0.7f64.powi(3) / 6.0).abs() < 1e-16);
        assert_eq!(Series4::exp_quadratic_coefficient(&q, [3, 2, 0, 0]), 0.0);
    }

    #[test]
    fn exp_of_mixed_quadratic() {
        // exp(a x² + b x y): [x^2 y^2] = b²/2 + ... only via (bxy)^2/2! and a x² * ... needs y², so b²/2
        let q = [
            Monomial { exps: [0, 0, 2, 0], coef: 0.3 },
            Monomial { exps: [0, 0, 1, 1], coef: 0.5 },
        ];
        let got = Series4::exp_quadratic_coefficient(&q, [0, 0, 2, 2]);
        assert!((got - 0.125).abs() < 1e-16);
        // [x^4] = a²/2
        let got = Series4::exp_quadratic_coefficient(&q, [0, 0, 4, 0]);
        assert!((got - 0.045).abs() < 1e-16);
    }
}
