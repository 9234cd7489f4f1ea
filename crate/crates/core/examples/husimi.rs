//! Husimi Q function: nonnegative everywhere, and equal to the Wigner
//! function smoothed by a vacuum Gaussian.

use std::f64::consts::PI;

use hesvs::analytic::ConditionalState;
use hesvs::gridscan::{grid_values, smoothed_wigner, GridObservable, GridSpec};
use hesvs::params::ModelParams;

fn main() -> hesvs::error::Result<()> {
    let spec = GridSpec::phase_space(GridObservable::Husimi);
    for m in 1..=4 {
        let state = ConditionalState::new(&ModelParams::new(PI / 7.0, 0.5, m)?)?;
        let q = grid_values(&spec, &state)?;
        let min = q.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = q.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        println!("m = {m}  min Q = {min:.3e}  max Q = {max:.5}");
    }

    let state = ConditionalState::new(&ModelParams::new(PI / 7.0, 0.5, 2)?)?;
    for (x, p) in [(0.0, 0.0), (1.0, 0.5), (-0.8, 1.2)] {
        println!(
            "({x:+.1}, {p:+.1})  husimi = {:.10}  smoothed wigner = {:.10}",
            state.husimi(x, p),
            smoothed_wigner(&state, x, p)
        );
    }
    Ok(())
}
