//! A small sweep written as CSV and read back.

use relplasma::sweep::{parse_grid, read_csv, render, run_sweep, OutputFormat, SweepSpec};

fn main() -> relplasma::error::Result<()> {
    let spec = SweepSpec {
        t: vec![0.0],
        zeta: vec![1.5, 2.0],
        omega: parse_grid("0.1,0.3")?,
        qmag: parse_grid("1e-4:0.3:3")?,
        ..Default::default()
    };
    let outcome = run_sweep(&spec)?;
    let csv = render(&outcome.records, OutputFormat::Csv)?;
    print!("{}", String::from_utf8_lossy(&csv));
    let back = read_csv(csv.as_slice())?;
    println!(
        "{} records, round trip exact: {}",
        back.len(),
        back == outcome.records
    );
    Ok(())
}
