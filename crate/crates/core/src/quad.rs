//! Numerical integration used by normalization and marginal checks.

use quadrature::double_exponential;

/// `∫_lo^hi f` by tanh-sinh quadrature on `pieces` equal subintervals.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, pieces: usize, tol: f64) -> f64 {
    let pieces = pieces.max(1);
    let h = (hi - lo) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let a = lo + i as f64 * h;
            double_exponential::integrate(&f, a, a + h, tol / pieces as f64).integral
        })
        .sum()
}

/// Composite Simpson rule over uniformly spaced samples. An even number of
/// samples gets a trapezoid on the last interval.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (values[0] + values[1]),
        _ => {
            let odd_end = if n % 2 == 1 { n } else { n - 1 };
            let mut s = values[0] + values[odd_end - 1];
            for (i, v) in values[1..odd_end - 1].iter().enumerate() {
                s += if i % 2 == 0 { 4.0 * v } else { 2.0 * v };
            }
            let mut total = s * h / 3.0;
            if odd_end < n {
                total += 0.5 * h * (values[n - 2] + values[n - 1]);
            }
            total
        }
    }
}

/// Simpson in both directions over a row-major grid (`nx` fastest).
pub fn simpson_2d(values: &[f64], nx: usize, hx: f64, hy: f64) -> f64 {
    let rows: Vec<f64> = values.chunks(nx).map(|row| simpson(row, hx)).collect();
    simpson(&rows, hy)
}
