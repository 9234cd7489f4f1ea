//! Sweep p(m) over r and write the table as CSV and JSON.
//!
//! `cargo run --example sweep -- out_dir` writes `p_event.csv` and
//! `p_event.json`; without an argument the CSV goes to stdout.

use std::f64::consts::PI;
use std::fs::File;

use hesvs::gridscan::{sweep, Cell, Format, SweepObservable, SweepSpec, SweepVariable};

fn main() -> hesvs::error::Result<()> {
    let spec = SweepSpec {
        variable: SweepVariable::R,
        range: [0.0, 3.0],
        points: 31,
        theta: PI / 7.0,
        r: 0.0,
        m_list: vec![1, 2, 3, 4],
    };
    let table = sweep(&spec, SweepObservable::PEvent)?;

    match std::env::args().nth(1) {
        Some(dir) => {
            std::fs::create_dir_all(&dir)?;
            table.write(Format::Csv, File::create(format!("{dir}/p_event.csv"))?)?;
            table.write(Format::Json, File::create(format!("{dir}/p_event.json"))?)?;
            println!("wrote {} rows to {dir}", table.rows.len());
        }
        None => table.write(Format::Csv, std::io::stdout().lock())?,
    }

    // where each curve peaks
    for m in &spec.m_list {
        let best = table
            .rows
            .iter()
            .filter(|row| row[1] == Cell::Int(*m as i64))
            .filter_map(|row| Some((row[0].as_f64()?, row[2].as_f64()?)))
            .fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        eprintln!("m = {m}: peak p = {:.4} at r = {:.2}", best.1, best.0);
    }
    Ok(())
}
