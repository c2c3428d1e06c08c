//! Exact escape probabilities: a single neighbor, and the half-line whose
//! escape probability decays like n^(-1/2).

use lerwlab::harmonic::{escape_probability, ObstacleSet};
use lerwlab::harness::{beurling_experiment, half_line};
use lerwlab::LatticePoint;

fn main() -> lerwlab::Result<()> {
    let single = ObstacleSet::new([LatticePoint::new(1, 0)]);
    println!("Es_1({{(1,0)}}) = {}", escape_probability(&single, 1.0)?);
    for n in [8.0, 32.0] {
        let line = ObstacleSet::new(half_line(n));
        println!("half-line, n = {n}: {:.6}", escape_probability(&line, n)?);
    }
    let rec = beurling_experiment(&[8.0, 16.0, 32.0, 64.0, 128.0])?;
    println!("log-log slope {:.4}", rec.fit.expect("fit").slope);
    Ok(())
}
