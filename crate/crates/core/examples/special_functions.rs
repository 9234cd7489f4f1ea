//! Hermite and Legendre polynomials at complex argument.

use hesvs::specfun::{binomial_exact, hermite, hermite_scaled, legendre, log_factorial};
use num_complex::Complex64;

fn main() -> hesvs::error::Result<()> {
    let z = Complex64::new(0.7, -0.3);
    for m in 0..=5 {
        let h = hermite(m, z)?;
        let p = legendre(m, z)?;
        println!("m = {m}  H = {:+.6}{:+.6}i  P = {:+.6}{:+.6}i", h.re, h.im, p.re, p.im);
    }

    // q^{m/2} H_m(w / sqrt q) stays a polynomial in q, so q = 0 and q < 0 are fine
    let w = Complex64::new(1.2, 0.0);
    for q in [1.0, 0.0, -0.5] {
        let v = hermite_scaled(4, w, Complex64::new(q, 0.0))?;
        println!("q = {q:+.1}  scaled H_4 = {:+.6}", v.re);
    }

    println!("ln 10! = {:.12}  ln 3628800 = {:.12}", log_factorial(10), 3628800f64.ln());
    println!("C(40, 20) = {:?}", binomial_exact(40, 20));
    Ok(())
}
