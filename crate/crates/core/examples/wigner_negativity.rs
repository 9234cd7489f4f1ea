//! Wigner function on the default window and the depth of its negative region.

use std::f64::consts::PI;

use hesvs::analytic::ConditionalState;
use hesvs::gridscan::{grid_values, GridObservable, GridSpec};
use hesvs::params::ModelParams;

fn main() -> hesvs::error::Result<()> {
    let spec = GridSpec::phase_space(GridObservable::Wigner);
    let (hx, hy) = spec.spacing();

    for m in 0..=4 {
        let state = ConditionalState::new(&ModelParams::new(PI / 7.0, 0.5, m)?)?;
        let w = grid_values(&spec, &state)?;
        let min = w.iter().cloned().fold(f64::INFINITY, f64::min);
        // W is normalized over d²α = dx dp / 2
        let negative_volume: f64 = w.iter().filter(|v| **v < 0.0).map(|v| -v * hx * hy / 2.0).sum();
        println!(
            "m = {m}  W(0,0) = {:+.5}  min W = {min:+.5}  negative volume = {negative_volume:.5}",
            state.wigner(0.0, 0.0)
        );
    }

    // a coarse picture of m = 2
    let state = ConditionalState::new(&ModelParams::new(PI / 7.0, 0.5, 2)?)?;
    for i in (0..21).rev() {
        let p = -3.0 + 0.3 * i as f64;
        let line: String = (0..41)
            .map(|j| {
                let w = state.wigner(-3.0 + 0.15 * j as f64, p);
                match w {
                    w if w < -0.05 => '-',
                    w if w > 0.2 => '#',
                    w if w > 0.05 => '+',
                    _ => '.',
                }
            })
            .collect();
        println!("{line}");
    }
    Ok(())
}
