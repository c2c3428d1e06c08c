//! Numerical checks built on discrete extremal length: the serial rule, the
//! Pfluger comparison between harmonic measure and extremal length, and the
//! dependence of LERW escape probabilities on crookedness.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{annular_domain, disk_with_arc, extremal_length, OuterTerminal, Polyline};
use crate::crookedness::{crookedness_counts, scale_config, scale_crossings};
use crate::error::{validation, Result};
use crate::harmonic::escape_probability_of;
use crate::lattice::LatticePoint;
use crate::looperase::{with_lerw_sample, SelfAvoidingPath};
use crate::stats::{least_squares, MeanEstimate};
use crate::walk::RandomStream;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SerialReport {
    pub radii: Vec<f64>,
    /// `Δ(D, ∂_n, ∂_0)` across the whole region.
    pub left: f64,
    /// `Δ(D, ∂_j, ∂_{j−1})` for each shell.
    pub parts: Vec<f64>,
    pub right: f64,
    /// `left − right`; zero when both sides are infinite.
    pub slack: f64,
    /// `slack / left`, with the limits 0 (both infinite) and 1 (only the
    /// left side infinite).
    pub relative_slack: f64,
}

/// Compares the extremal length across the shells `radii[0] < … < radii[k]`
/// of the unit disk minus `slits` with the sum over the individual shells.
pub fn serial_rule_check(slits: &[Polyline], radii: &[f64], mesh: f64) -> Result<SerialReport> {
    if radii.len() < 2 {
        return Err(validation("serial rule needs at least two radii"));
    }
    if radii.windows(2).any(|w| !(w[0] < w[1])) || radii[0] <= 0.0 {
        return Err(validation("radii must be positive and strictly increasing"));
    }
    let k = radii.len() - 1;
    let left = extremal_length(&annular_domain(radii[0], radii[k], slits, mesh, OuterTerminal::Whole)?)?.extremal_length;
    let parts: Vec<f64> = if k == 1 {
        vec![left]
    } else {
        radii
            .windows(2)
            .map(|w| Ok(extremal_length(&annular_domain(w[0], w[1], slits, mesh, OuterTerminal::Whole)?)?.extremal_length))
            .collect::<Result<_>>()?
    };
    let right: f64 = parts.iter().sum();
    let (slack, relative_slack) = match (left.is_infinite(), right.is_infinite()) {
        (true, true) => (0.0, 0.0),
        (true, false) => (f64::INFINITY, 1.0),
        _ => (left - right, (left - right) / left),
    };
    Ok(SerialReport { radii: radii.to_vec(), left, parts, right, slack, relative_slack })
}

/// Random polyline slits in the annulus `r_in < |z| < 1`: one to three
/// polylines of two to four vertices each.
pub fn random_slits(r_in: f64, stream: RandomStream) -> Vec<Polyline> {
    let mut rng = stream.rng();
    let count = rng.random_range(1..=3);
    (0..count)
        .map(|_| {
            let verts = rng.random_range(2..=4);
            let points = (0..verts)
                .map(|_| {
                    let r = r_in + (1.0 - r_in) * rng.random::<f64>();
                    let t = TAU * rng.random::<f64>();
                    [r * t.cos(), r * t.sin()]
                })
                .collect();
            Polyline::new(points)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PflugerReport {
    pub arc_length: f64,
    pub r: u32,
    /// Harmonic measure of the arc seen from the origin.
    pub harmonic_measure: f64,
    /// `Δ` from the circle of radius `e^{-r}` to the arc inside the disk.
    pub extremal_length: f64,
    /// `log(harmonic_measure) + π · extremal_length`.
    pub value: f64,
}

/// Harmonic measure of the arc `E = {|θ| ≤ l/2}` of the unit circle from the
/// origin against `exp(−π Δ)`, where `Δ` is the extremal length from the
/// circle of radius `e^{-r}` to `E` (the rest of the unit circle insulated).
pub fn pfluger_check(arc_length: f64, r: u32, mesh: f64) -> Result<PflugerReport> {
    if !(arc_length > 0.0 && arc_length <= TAU) {
        return Err(validation(format!("arc length must lie in (0, 2π], got {arc_length}")));
    }
    if !(1..=5).contains(&r) {
        return Err(validation(format!("r must lie in 1..=5, got {r}")));
    }
    let harmonic_measure = if arc_length >= TAU {
        1.0
    } else {
        let disk = disk_with_arc(arc_length, mesh)?;
        let origin = disk.nearest_vertex([0.0, 0.0]).expect("disk has vertices");
        disk.potential()?.values[origin]
    };
    let inner = (-(r as f64)).exp();
    let outer = if arc_length >= TAU { OuterTerminal::Whole } else { OuterTerminal::Arc(arc_length) };
    let delta = extremal_length(&annular_domain(inner, 1.0, &[], mesh, outer)?)?.extremal_length;
    Ok(PflugerReport { arc_length, r, harmonic_measure, extremal_length: delta, value: harmonic_measure.ln() + PI * delta })
}

/// A LERW path reaching `∂C^m` with its crookedness count `Z_{δ,m}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeSample {
    pub path: SelfAvoidingPath,
    pub m: u32,
    pub crooked: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeBucket {
    pub m: u32,
    pub crooked: u32,
    pub escape: MeanEstimate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EscapeRegression {
    pub delta: Option<f64>,
    pub buckets: Vec<EscapeBucket>,
    /// Intercept of `log Es` in the fit.
    pub intercept: f64,
    /// `(coefficient, stderr)` of `m`, when `m` varies across samples.
    pub m_coefficient: Option<(f64, f64)>,
    /// `(coefficient, stderr)` of `Z`, when `Z` varies across samples.
    pub z_coefficient: Option<(f64, f64)>,
    pub r_squared: f64,
    pub samples: usize,
    pub warnings: Vec<String>,
}

/// `walkers` LERW samples under `μ_{e^m, 2e^m}` for each `m`, with their
/// crookedness counts. Sample `i` at scale `m` uses `stream.derive_path([m, i])`.
pub fn crooked_lerw_samples(scales: &[u32], delta: f64, walkers: usize, stream: RandomStream) -> Result<Vec<EscapeSample>> {
    if walkers == 0 {
        return Err(validation("walkers must be positive"));
    }
    if scales.is_empty() {
        return Err(validation("at least one scale is required"));
    }
    let jobs: Vec<(u32, u64)> = scales.iter().flat_map(|&m| (0..walkers as u64).map(move |i| (m, i))).collect();
    jobs.into_par_iter()
        .map(|(m, i)| {
            let cfg = scale_config(m, 2.0)?;
            with_lerw_sample(&cfg, stream.derive_path(&[m as u64, i]), |pts| -> Result<EscapeSample> {
                let stats = scale_crossings(pts, m)?;
                let crooked = crookedness_counts(&stats, delta)?.crooked_count;
                Ok(EscapeSample { path: SelfAvoidingPath::from_trusted(pts.to_vec()), m, crooked })
            })?
        })
        .collect()
}

/// Samples LERWs at each scale and regresses their escape probabilities on
/// `(m, Z_{δ,m})`.
pub fn escape_vs_crookedness(scales: &[u32], delta: f64, walkers: usize, stream: RandomStream) -> Result<EscapeRegression> {
    let samples = crooked_lerw_samples(scales, delta, walkers, stream)?;
    let mut report = escape_vs_crookedness_from(&samples)?;
    report.delta = Some(delta);
    Ok(report)
}

/// Exact escape probabilities `Es_{e^m}(path)`, bucketed by `(m, Z)`, and the
/// least-squares fit `log Es ≈ a + b·m + c·Z`.
pub fn escape_vs_crookedness_from(samples: &[EscapeSample]) -> Result<EscapeRegression> {
    if samples.is_empty() {
        return Err(validation("no samples"));
    }
    for s in samples {
        if !s.path.points()[0].is_origin() {
            return Err(validation("sample paths must start at the origin"));
        }
    }
    let escapes: Vec<f64> = samples
        .par_iter()
        .map(|s| escape_probability_of(s.path.points(), (s.m as f64).exp()))
        .collect::<Result<_>>()?;
    let mut warnings = Vec::new();
    let mut groups: BTreeMap<(u32, u32), Vec<f64>> = BTreeMap::new();
    for (s, &e) in samples.iter().zip(&escapes) {
        groups.entry((s.m, s.crooked)).or_default().push(e);
    }
    let buckets: Vec<EscapeBucket> = groups
        .iter()
        .map(|(&(m, crooked), v)| EscapeBucket { m, crooked, escape: MeanEstimate::from_values(v) })
        .collect();
    for b in buckets.iter().filter(|b| b.escape.samples < 2) {
        warnings.push(format!("bucket m={} Z={} has a single sample", b.m, b.crooked));
    }
    let kept: Vec<(f64, f64, f64)> = samples
        .iter()
        .zip(&escapes)
        .filter(|(_, &e)| e > 0.0)
        .map(|(s, &e)| (s.m as f64, s.crooked as f64, e.ln()))
        .collect();
    let dropped = samples.len() - kept.len();
    if dropped > 0 {
        warnings.push(format!("{dropped} samples with zero escape probability left out of the fit"));
    }
    let varies = |f: fn(&(f64, f64, f64)) -> f64| kept.iter().any(|t| f(t) != f(&kept[0]));
    let use_m = varies(|t| t.0);
    let use_z = varies(|t| t.1);
    let rows: Vec<Vec<f64>> = kept
        .iter()
        .map(|t| {
            let mut r = vec![1.0];
            if use_m {
                r.push(t.0);
            }
            if use_z {
                r.push(t.1);
            }
            r
        })
        .collect();
    let y: Vec<f64> = kept.iter().map(|t| t.2).collect();
    let fit = least_squares(&rows, &y)?;
    let coef = |k: usize| (fit.coefficients[k], fit.stderr[k]);
    let m_coefficient = use_m.then(|| coef(1));
    let z_coefficient = use_z.then(|| coef(if use_m { 2 } else { 1 }));
    Ok(EscapeRegression {
        delta: None,
        buckets,
        intercept: fit.coefficients[0],
        m_coefficient,
        z_coefficient,
        r_squared: fit.r_squared,
        samples: kept.len(),
        warnings,
    })
}

/// The straight half-line path from the origin to `∂C^m` along `+e1`.
pub fn straight_ray(m: u32) -> SelfAvoidingPath {
    let r = (m as f64).exp();
    let len = r.floor() as i32 + 1;
    SelfAvoidingPath::from_trusted((0..=len).map(|x| LatticePoint::new(x, 0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_shell_has_zero_slack() {
        let rep = serial_rule_check(&[], &[0.3, 1.0], 1.0 / 32.0).unwrap();
        assert_eq!(rep.slack, 0.0);
        assert_eq!(rep.parts, vec![rep.left]);
    }

    #[test]
    fn full_annulus_shells_nearly_add() {
        let rep = serial_rule_check(&[], &[0.25, 0.5, 1.0], 1.0 / 64.0).unwrap();
        assert!(rep.slack >= -1e-9);
        assert!(rep.relative_slack.abs() < 0.02, "{rep:?}");
    }

    #[test]
    fn pfluger_full_circle() {
        let rep = pfluger_check(TAU, 1, 1.0 / 32.0).unwrap();
        assert_eq!(rep.harmonic_measure, 1.0);
        assert!((rep.extremal_length - 1.0 / TAU).abs() < 0.01);
        assert!(rep.value.is_finite());
        assert!(pfluger_check(0.0, 1, 0.1).is_err());
        assert!(pfluger_check(1.0, 6, 0.1).is_err());
    }

    #[test]
    fn zero_walkers_rejected() {
        assert!(escape_vs_crookedness(&[2], 0.05, 0, RandomStream::new(1, 1)).is_err());
    }

    #[test]
    fn straight_ray_reaches_scale() {
        for m in 1..5 {
            let p = straight_ray(m);
            assert!(p.tip().norm() >= (m as f64).exp());
            assert!(p.points()[p.len() - 2].norm() < (m as f64).exp());
        }
    }
}
