//! Build the heralded state by brute force in the Fock basis and compare it
//! with the closed-form state.

use std::f64::consts::PI;

use hesvs::analytic::ConditionalState;
use hesvs::oracle::{conditional_amplitudes, oracle_mean, oracle_q, oracle_wigner, TruncationPolicy};
use hesvs::params::ModelParams;

fn main() -> hesvs::error::Result<()> {
    let policy = TruncationPolicy::default();
    for (theta, r, m) in [(PI / 7.0, 0.5, 1), (PI / 5.0, 1.0, 2), (3.0 * PI / 7.0, 1.5, 3)] {
        let p = ModelParams::new(theta, r, m)?;
        let (oracle, prob) = conditional_amplitudes(&p, &policy)?;
        let analytic = ConditionalState::new(&p)?;
        let closed = analytic.fock_state(oracle.n_max())?;

        println!("theta = {theta:.4}, r = {r}, m = {m}, cutoff n = {}", oracle.n_max());
        println!("  p(m)    oracle {prob:.14e}  closed {:.14e}", analytic.event_probability());
        println!("  <n>     oracle {:.14}  closed {:.14}", oracle_mean(&oracle), analytic.mean_photon()?);
        println!("  Q       oracle {:+.14}  closed {:+.14}", oracle_q(&oracle)?, analytic.mandel_q()?);
        println!("  W(.3,.2) oracle {:+.14}  closed {:+.14}", oracle_wigner(&oracle, 0.3, 0.2), analytic.wigner(0.3, 0.2));
        println!("  |<oracle|closed>| = {:.15}", oracle.overlap_abs(&closed));
    }
    Ok(())
}
