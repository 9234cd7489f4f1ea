//! Sign map of Mandel Q over (θ, r): `-` sub-Poissonian, `+` super-Poissonian.

use hesvs::gridscan::{q_region_map, QMapSpec};

fn main() -> hesvs::error::Result<()> {
    for m in [1, 2] {
        let spec = QMapSpec::full(m, 46, 21);
        let table = q_region_map(&spec)?;
        let q = table.column("mandel_q").expect("mandel_q column");

        println!("m = {m}  (theta across 0..pi/2, r up 0..2)");
        for j in (0..spec.r_points).rev() {
            let line: String = (0..spec.theta_points)
                .map(|i| match q[j * spec.theta_points + i].as_f64() {
                    None => ' ',
                    Some(v) if v < 0.0 => '-',
                    Some(_) => '+',
                })
                .collect();
            println!("  |{line}|");
        }
    }
    Ok(())
}
