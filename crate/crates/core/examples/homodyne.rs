//! Homodyne quadrature density at a few phases, plus its normalization.

use std::f64::consts::PI;

use hesvs::analytic::ConditionalState;
use hesvs::gridscan::linspace;
use hesvs::params::ModelParams;
use hesvs::quad::integrate;

fn main() -> hesvs::error::Result<()> {
    let state = ConditionalState::new(&ModelParams::new(PI / 7.0, 0.5, 2)?)?;

    for phi in [0.0, PI / 4.0, PI / 2.0] {
        let total = integrate(|x| state.qcd(x, phi), -12.0, 12.0, 8, 1e-12);
        println!("phi = {phi:.4}  integral = {total:.12}");
        for x in linspace(-3.0, 3.0, 13) {
            let v = state.qcd(x, phi);
            println!("  x = {x:+.2}  P = {v:.6}  {}", "*".repeat((v * 80.0).round() as usize));
        }
    }

    let psi = state.quad_wavefunction(0.7, 0.0);
    println!("psi(0.7, phi = 0) = {:.6}{:+.6}i", psi.re, psi.im);
    Ok(())
}
