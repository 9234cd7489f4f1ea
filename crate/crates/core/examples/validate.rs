//! Closed forms against the Fock-basis oracle over the default grid, then the
//! same run with a deliberately wrong B1 to show the checks failing.

use hesvs::gridscan::{validate, Fault, ValidationConfig};

fn main() -> hesvs::error::Result<()> {
    let report = validate(&ValidationConfig::default())?;
    println!("overall: {}", if report.pass { "pass" } else { "FAIL" });
    for c in &report.checks {
        println!(
            "  {:<22} {:>6} samples  max rel {:.2e}  max abs {:.2e}  {}",
            c.name,
            c.samples,
            c.max_rel_error,
            c.max_abs_error,
            if c.pass { "ok" } else { "FAIL" }
        );
    }
    for f in &report.findings {
        println!("  finding {}: {} (deviation {:.3e})", f.name, f.statement, f.max_deviation);
    }

    let broken = ValidationConfig { fault: Some(Fault::ScaleB1(1.01)), ..ValidationConfig::default() };
    let report = validate(&broken)?;
    let failed = report.failed();
    println!("with B1 scaled by 1.01: pass = {}, failing: {failed:?}", report.pass);
    Ok(())
}
