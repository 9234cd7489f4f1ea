//! Normally ordered moments, mean photon number and Mandel Q.

use std::f64::consts::PI;

use hesvs::analytic::ConditionalState;
use hesvs::params::ModelParams;

fn main() -> hesvs::error::Result<()> {
    let theta = PI / 5.0;
    for r in [0.5, 1.5, 2.5] {
        println!("theta = pi/5, r = {r}");
        for m in 1..=4 {
            let s = ConditionalState::new(&ModelParams::new(theta, r, m)?)?;
            let report = s.report()?;
            let q = report.mandel_q.map_or("undefined".into(), |q| format!("{q:+.4}"));
            println!("  m = {m}  p = {:.4e}  <n> = {:8.4}  Q = {q}", report.p_event, report.mean_n);
        }
    }

    let s = ConditionalState::new(&ModelParams::new(theta, 0.5, 2)?)?;
    println!("<a^k a+^l> at r = 0.5, m = 2:");
    for k in 0..=2 {
        let row: Vec<String> = (0..=2)
            .map(|l| s.moments(k, l).map(|z| format!("{:+.5}{:+.5}i", z.re, z.im)))
            .collect::<Result<_, _>>()?;
        println!("  k = {k}: {}", row.join("  "));
    }
    Ok(())
}
