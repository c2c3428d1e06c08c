//! Moments of X_n, the probability that an independent walk escapes a LERW.

use lerwlab::harmonic::{moment_estimate, third_moment_via_walks};
use lerwlab::harness::xn_scaling_experiment;
use lerwlab::RandomStream;

fn main() -> lerwlab::Result<()> {
    let stream = RandomStream::new(3, 0);
    for rec in xn_scaling_experiment(&[8.0, 16.0, 32.0], 200, &[1, 3], stream)? {
        let fit = rec.fit.expect("fit");
        println!("{}: slope {:.3}", rec.name, fit.slope);
    }
    let cubed = moment_estimate(8.0, 3, 1000, stream.derive(1), true)?;
    let walks = third_moment_via_walks(8.0, 5000, stream.derive(2))?;
    println!("E[X'^3] at n = 8: solver {:.5} ± {:.5}, three walks {:.5} ± {:.5}", cubed.value, cubed.stderr, walks.value, walks.stderr);
    Ok(())
}
