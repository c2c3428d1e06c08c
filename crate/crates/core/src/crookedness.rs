//! Per-scale crossing statistics of paths from the origin.
//!
//! For scales `k = 0, …, m`, `η_k` is the first index at which the path
//! reaches norm `≥ e^k`, i.e. its first visit to `∂C^k`. The angle changes
//! `Y_k = dist(arg ω(η_k), arg ω(η_{k−1}))`, `k = 1, …, m`, feed the
//! straightness count `Ŵ = #{k : Y_k ≤ δ}` and the crookedness count
//! `Z = #{k : Y_k ≥ δ}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::lattice::{angular_distance, argument, BallSpec, LatticePath, LatticePoint};
use crate::looperase::{with_lerw_sample, LerwSampleConfig, SelfAvoidingPath};
use crate::stats::MeanEstimate;
use crate::walk::RandomStream;

/// Default angle threshold for acceptance runs.
pub const DEFAULT_DELTA: f64 = 0.05;
/// Default fraction of straight scales for acceptance runs.
pub const DEFAULT_EPSILON: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingStats {
    pub scale_indices: Vec<u32>,
    pub hit_indices: Vec<usize>,
    pub angles: Vec<f64>,
    /// `Y_1, …, Y_m`.
    pub angle_changes: Vec<f64>,
}

impl CrossingStats {
    /// Number of scale transitions `m`.
    pub fn scales(&self) -> u32 {
        self.angle_changes.len() as u32
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrookednessCounts {
    pub delta: f64,
    pub straight_count: u32,
    pub crooked_count: u32,
    pub scales: u32,
}

/// Paths whose points can be scanned for crossings.
pub trait PointSeq {
    fn point_seq(&self) -> &[LatticePoint];
}

impl PointSeq for LatticePath {
    fn point_seq(&self) -> &[LatticePoint] {
        self.points()
    }
}

impl PointSeq for SelfAvoidingPath {
    fn point_seq(&self) -> &[LatticePoint] {
        self.points()
    }
}

impl PointSeq for [LatticePoint] {
    fn point_seq(&self) -> &[LatticePoint] {
        self
    }
}

/// First hits of `∂C^0, …, ∂C^m` and the angle changes between them.
pub fn scale_crossings<P: PointSeq + ?Sized>(path: &P, m: u32) -> Result<CrossingStats> {
    let points = path.point_seq();
    if points.first().is_none_or(|p| !p.is_origin()) {
        return Err(validation("path must start at the origin"));
    }
    let balls: Vec<BallSpec> = (0..=m).map(BallSpec::exponential).collect::<Result<_>>()?;
    let mut hit_indices = Vec::with_capacity(m as usize + 1);
    let mut k = 0usize;
    for (idx, &p) in points.iter().enumerate() {
        // Unit steps change the norm by at most 1 < e^{k+1} − e^k, so one
        // point never completes two scales.
        if k <= m as usize && !balls[k].contains(p) {
            hit_indices.push(idx);
            k += 1;
            if k > m as usize {
                break;
            }
        }
    }
    if hit_indices.len() < m as usize + 1 {
        return Err(validation(format!(
            "path reaches only {} of the {} scales",
            hit_indices.len(),
            m + 1
        )));
    }
    let angles: Vec<f64> = hit_indices.iter().map(|&i| argument(points[i])).collect::<Result<_>>()?;
    let angle_changes = angles.windows(2).map(|w| angular_distance(w[1], w[0])).collect();
    Ok(CrossingStats { scale_indices: (0..=m).collect(), hit_indices, angles, angle_changes })
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < std::f64::consts::FRAC_PI_2) {
        return Err(validation(format!("delta must lie in (0, π/2), got {delta}")));
    }
    Ok(())
}

/// `Ŵ` and `Z` for threshold `δ`; a tie `Y_k = δ` counts toward both.
pub fn crookedness_counts(stats: &CrossingStats, delta: f64) -> Result<CrookednessCounts> {
    check_delta(delta)?;
    Ok(CrookednessCounts {
        delta,
        straight_count: stats.angle_changes.iter().filter(|&&y| y <= delta).count() as u32,
        crooked_count: stats.angle_changes.iter().filter(|&&y| y >= delta).count() as u32,
        scales: stats.scales(),
    })
}

/// LERW measure for the straightness experiments: inner radius `e^n`, outer
/// radius `outer_factor · e^n`. A factor of 1 is the walk erased at `∂C^n`
/// itself; larger factors approximate the infinite walk.
pub fn scale_config(n: u32, outer_factor: f64) -> Result<LerwSampleConfig> {
    let r = (n as f64).exp();
    LerwSampleConfig::new(r, outer_factor * r)
}

/// `Ŵ_{n,δ}` for `samples` LERW paths; sample `i` uses `stream.derive(i)`.
pub fn straight_counts(n: u32, delta: f64, samples: usize, outer_factor: f64, stream: RandomStream) -> Result<Vec<u32>> {
    check_delta(delta)?;
    let cfg = scale_config(n, outer_factor)?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            with_lerw_sample(&cfg, stream.derive(i), |pts| -> Result<u32> {
                let stats = scale_crossings(pts, n)?;
                Ok(crookedness_counts(&stats, delta)?.straight_count)
            })?
        })
        .collect()
}

/// Fraction of counts with `Ŵ ≥ ε n`.
pub fn tail_fraction(counts: &[u32], n: u32, epsilon: f64) -> MeanEstimate {
    let threshold = epsilon * n as f64;
    MeanEstimate::from_indicators(counts.iter().map(|&w| w as f64 >= threshold))
}

/// Estimate of `P{Ŵ_{n,δ} ≥ εn}` under `μ_{e^n, 2e^n}`.
pub fn straightness_tail(n: u32, delta: f64, epsilon: f64, samples: usize, stream: RandomStream) -> Result<MeanEstimate> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(validation(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    let counts = straight_counts(n, delta, samples, 2.0, stream)?;
    Ok(tail_fraction(&counts, n, epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ray(len: i32) -> Vec<LatticePoint> {
        (0..=len).map(|x| LatticePoint::new(x, 0)).collect()
    }

    #[test]
    fn straight_ray() {
        let stats = scale_crossings(ray(21).as_slice(), 3).unwrap();
        assert_eq!(stats.hit_indices, vec![1, 3, 8, 21]);
        assert!(stats.angles.iter().all(|&a| a == 0.0));
        assert!(stats.angle_changes.iter().all(|&y| y == 0.0));
        let c = crookedness_counts(&stats, 0.1).unwrap();
        assert_eq!((c.straight_count, c.crooked_count, c.scales), (3, 0, 3));
    }

    #[test]
    fn too_short() {
        assert!(scale_crossings(ray(19).as_slice(), 3).is_err());
        assert!(scale_crossings([LatticePoint::new(1, 0)].as_slice(), 0).is_err());
    }

    #[test]
    fn eta_zero_is_one() {
        let p = vec![LatticePoint::new(0, 0), LatticePoint::new(0, -1), LatticePoint::new(0, -2)];
        assert_eq!(scale_crossings(p.as_slice(), 0).unwrap().hit_indices, vec![1]);
    }

    #[test]
    fn l_shaped_path() {
        // Out along +x to norm ≥ e², then a staircase heading toward angle π/4.
        let mut pts = ray(8);
        let mut cur = *pts.last().unwrap();
        while cur.norm() < 3f64.exp() + 2.0 {
            cur = if cur.y < cur.x { cur + LatticePoint::new(0, 1) } else { cur + LatticePoint::new(1, 0) };
            pts.push(cur);
        }
        let stats = scale_crossings(pts.as_slice(), 3).unwrap();
        let end = pts[stats.hit_indices[3]];
        let expected = (end.y as f64).atan2(end.x as f64);
        assert!((stats.angle_changes[2] - expected).abs() < 1e-12);
        assert!((stats.angle_changes[2] - PI / 4.0).abs() < 0.15);
    }

    #[test]
    fn tie_counts_twice_and_range_checks() {
        let stats = CrossingStats {
            scale_indices: vec![0, 1],
            hit_indices: vec![1, 3],
            angles: vec![0.0, 0.1],
            angle_changes: vec![0.1],
        };
        let c = crookedness_counts(&stats, 0.1).unwrap();
        assert_eq!((c.straight_count, c.crooked_count), (1, 1));
        assert!(crookedness_counts(&stats, 0.0).is_err());
        assert!(crookedness_counts(&stats, PI / 2.0).is_err());
        let quarter = CrossingStats { angle_changes: vec![PI / 2.0; 4], ..stats };
        let c = crookedness_counts(&quarter, 0.1).unwrap();
        assert_eq!((c.straight_count, c.crooked_count), (0, 4));
    }

    #[test]
    fn tail_is_monotone_in_epsilon() {
        let counts = straight_counts(3, 0.3, 400, 2.0, RandomStream::new(3, 1)).unwrap();
        let mut prev = 1.0;
        for eps in [0.1, 0.3, 0.5, 0.7, 0.9, 1.0] {
            let t = tail_fraction(&counts, 3, eps).mean;
            assert!(t <= prev);
            prev = t;
        }
        let direct = straightness_tail(3, 0.3, 0.5, 400, RandomStream::new(3, 1)).unwrap();
        assert_eq!(direct, tail_fraction(&counts, 3, 0.5));
    }
}
