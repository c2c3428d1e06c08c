//! Straightness and crookedness counts of LERW paths across exponential scales.

use lerwlab::crookedness::{crookedness_counts, scale_config, scale_crossings, straightness_tail};
use lerwlab::extremal::escape_vs_crookedness;
use lerwlab::{sample_lerw, RandomStream};

fn main() -> lerwlab::Result<()> {
    let stream = RandomStream::new(11, 0);
    let path = sample_lerw(&scale_config(4, 2.0)?, stream)?;
    let counts = crookedness_counts(&scale_crossings(&path, 4)?, 0.3)?;
    println!("one path: {} straight, {} crooked of {} scales", counts.straight_count, counts.crooked_count, counts.scales);
    for n in 2..=4 {
        let tail = straightness_tail(n, 0.05, 0.5, 1000, stream.derive(n as u64))?;
        println!("P(straight on at least half of {n} scales) = {:.4} ± {:.4}", tail.mean, tail.stderr);
    }
    let reg = escape_vs_crookedness(&[2, 3], 0.05, 300, stream.derive(99))?;
    println!("log escape regression: Z coefficient {:?}, m coefficient {:?}", reg.z_coefficient, reg.m_coefficient);
    Ok(())
}
