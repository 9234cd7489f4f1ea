//! Heralding probability p(m) at θ = π/7, r = 0.5, with both
//! normalization routes side by side.

use std::f64::consts::PI;

use hesvs::analytic::{event_probability, norm_direct, norm_legendre};
use hesvs::params::{derive, ModelParams};

fn main() -> hesvs::error::Result<()> {
    let d = derive(&ModelParams::new(PI / 7.0, 0.5, 0)?)?;

    println!("{:>2} {:>14} {:>14} {:>14}", "m", "p(m)", "N direct", "N legendre");
    for m in 0..=6 {
        let prob = event_probability(&d, m)?;
        let legendre = norm_legendre(&d, m)?.map_or("-".to_string(), |v| format!("{v:.6e}"));
        println!("{m:>2} {prob:>14.6e} {:>14.6e} {legendre:>14}", norm_direct(&d, m));
    }

    // detecting nothing when nothing was squeezed is certain
    let vac = derive(&ModelParams::new(PI / 7.0, 1e-9, 0)?)?;
    println!("r -> 0, m = 0: p = {}", event_probability(&vac, 0)?);

    // a balanced splitter never heralds an odd count
    let balanced = derive(&ModelParams::new(PI / 4.0, 0.5, 0)?)?;
    match event_probability(&balanced, 1) {
        Ok(p) => println!("theta = pi/4, m = 1: p = {p}"),
        Err(e) => println!("theta = pi/4, m = 1: {e}"),
    }
    Ok(())
}
