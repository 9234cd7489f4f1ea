//! Fock-basis beam-splitter matrix elements and block unitarity.

use std::f64::consts::PI;

use hesvs::oracle::{bs_block, bs_matrix_element};

fn main() {
    let theta = PI / 7.0;
    println!("<j1 j2| B(theta) |k1 k2>, total photon number 2:");
    let basis = [(2, 0), (1, 1), (0, 2)];
    for (j1, j2) in basis {
        let row: Vec<String> = basis.iter().map(|&(k1, k2)| format!("{:+.6}", bs_matrix_element(theta, j1, j2, k1, k2))).collect();
        println!("  <{j1}{j2}|  {}", row.join("  "));
    }

    // the splitter conserves photon number, so each block is orthogonal on its own
    for total in [5, 20, 40] {
        let b = bs_block(theta, total);
        let n = b.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let dot: f64 = (0..n).map(|k| b[k][i] * b[k][j]).sum();
                worst = worst.max((dot - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        println!("block N = {total:>2}: max |B^T B - 1| = {worst:.2e}");
    }
}
