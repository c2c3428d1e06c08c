//! Sample loop-erased walks from the origin to radius 32 and print their lengths.

use lerwlab::{sample_lerw, LerwSampleConfig, RandomStream};

fn main() -> lerwlab::Result<()> {
    let cfg = LerwSampleConfig::doubled(32.0)?;
    let stream = RandomStream::new(7, 0);
    for i in 0..5 {
        let path = sample_lerw(&cfg, stream.derive(i))?;
        println!("sample {i}: {} steps, ends at {}", path.steps(), path.tip());
    }
    Ok(())
}
