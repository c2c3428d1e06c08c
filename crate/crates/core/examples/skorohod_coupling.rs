//! Embed a simple random walk in a planar Brownian motion and watch the
//! coupling error grow with the horizon.

use lerwlab::coupling::{crossing_increments, deviation_scaling, sample_bm, skorohod_embed};
use lerwlab::stats::MeanEstimate;
use lerwlab::RandomStream;

fn main() -> lerwlab::Result<()> {
    let stream = RandomStream::new(2, 0);
    let bm = sample_bm(300.0, 1e-3, stream.derive(0))?;
    let rec = skorohod_embed(&bm, 200, stream.derive(1))?;
    println!("200 embedded steps end at {}; max deviation {:.3}", rec.walk.end(), rec.deviation);
    let eta = MeanEstimate::from_values(&crossing_increments(1e-3, 100_000, stream.derive(2))?);
    println!("mean crossing time {:.4} ± {:.4}", eta.mean, eta.stderr);
    let fit = deviation_scaling(&[64, 256, 1024], 32, 1e-3, stream.derive(3))?;
    for (ln_n, ln_d) in &fit.points {
        println!("N = {:>5}: median deviation {:.3}", ln_n.exp().round(), ln_d.exp());
    }
    println!("deviation exponent {:.3}", fit.slope);
    Ok(())
}
