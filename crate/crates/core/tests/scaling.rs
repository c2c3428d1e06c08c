//! Relations between fitted moment exponents that hold for any sample.

use lerwlab::harness::xn_scaling_experiment;
use lerwlab::RandomStream;

/// Jensen's inequality gives E[X³] ≥ E[X]³ at every radius, so the third
/// moment cannot decay faster than three times the first: slope₃ ≥ 3·slope₁.
#[test]
fn third_moment_slope_respects_jensen() {
    let recs = xn_scaling_experiment(&[8.0, 16.0, 32.0], 300, &[1, 3], RandomStream::new(31, 0)).unwrap();
    let (k1, k3) = (&recs[0], &recs[1]);
    for (a, b) in k1.points.iter().zip(&k3.points) {
        assert!(b.estimate >= a.estimate.powi(3), "n = {}", a.n);
    }
    let (f1, f3) = (k1.fit.as_ref().unwrap(), k3.fit.as_ref().unwrap());
    let se = (9.0 * f1.slope_stderr.unwrap().powi(2) + f3.slope_stderr.unwrap().powi(2)).sqrt();
    assert!(f3.slope >= 3.0 * f1.slope - 2.0 * se, "{} vs 3 × {}", f3.slope, f1.slope);
}
