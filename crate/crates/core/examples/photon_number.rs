//! Photon-number distribution of the heralded state.

use std::f64::consts::PI;

use hesvs::analytic::ConditionalState;
use hesvs::params::ModelParams;

fn main() -> hesvs::error::Result<()> {
    for r in [0.5, 1.0] {
        let state = ConditionalState::new(&ModelParams::new(2.0 * PI / 7.0, r, 1)?)?;
        println!("theta = 2pi/7, r = {r}, m = 1, <n> = {:.4}", state.mean_photon()?);
        for n in 0..12 {
            let pn = state.pnd(n);
            println!("  P({n:>2}) = {pn:.6}  {}", "#".repeat((pn * 60.0).round() as usize));
        }
    }

    // at θ = 0 the heralded state is a Fock state
    let fock = ConditionalState::new(&ModelParams::new(0.0, 0.8, 3)?)?;
    let head: Vec<f64> = (0..8).map(|n| fock.pnd(n)).collect();
    println!("theta = 0, m = 3: {head:.3?}");
    Ok(())
}
