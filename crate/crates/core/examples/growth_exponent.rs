//! Estimate the growth exponent from mean LERW lengths at several radii.

use lerwlab::harness::growth_exponent_experiment;
use lerwlab::RandomStream;

fn main() -> lerwlab::Result<()> {
    let rec = growth_exponent_experiment(&[8.0, 16.0, 32.0, 64.0], 500, RandomStream::new(1, 0))?;
    for p in &rec.points {
        println!("n = {:>4}: E[steps] = {:.1} ± {:.1}", p.n, p.estimate, p.stderr);
    }
    let fit = rec.fit.expect("fit");
    println!("slope {:.3} ± {:.3}", fit.slope, fit.slope_stderr.unwrap_or(f64::NAN));
    Ok(())
}
