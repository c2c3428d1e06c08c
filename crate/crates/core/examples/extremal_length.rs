//! Discrete extremal lengths of a rectangle and a split annulus, the serial
//! rule on a slit domain, and the harmonic-measure comparison.

use std::f64::consts::PI;

use lerwlab::extremal::{build_domain, extremal_length, pfluger_check, random_slits, serial_rule_check, Shape, DEFAULT_MESH};
use lerwlab::RandomStream;

fn main() -> lerwlab::Result<()> {
    let rect = extremal_length(&build_domain(&Shape::Rectangle { a: 2.0, b: 1.0 }, DEFAULT_MESH)?)?;
    println!("rectangle 2×1: {:.4} (continuum 2)", rect.extremal_length);
    let ann = extremal_length(&build_domain(&Shape::SplitAnnulus { n: 1.0 }, DEFAULT_MESH)?)?;
    println!("split annulus n = 1: {:.4} (continuum {:.4})", ann.extremal_length, 1.0 / (2.0 * PI));
    let radii: Vec<f64> = [-1.5f64, -1.0, -0.5, 0.0].iter().map(|e| e.exp()).collect();
    let slits = random_slits(radii[0], RandomStream::new(5, 0));
    let serial = serial_rule_check(&slits, &radii, DEFAULT_MESH)?;
    println!("serial rule: whole {:.4} ≥ sum of parts {:.4}", serial.left, serial.right);
    let p = pfluger_check(PI / 2.0, 2, DEFAULT_MESH)?;
    println!("arc π/2: harmonic measure {:.4}, extremal length {:.4}, ln ω + πΔ = {:.3}", p.harmonic_measure, p.extremal_length, p.value);
    Ok(())
}
