//! Chronological loop-erasure and loop-erased random walk samplers.
//!
//! For a path `ω = [ω(0), …, ω(n)]` the erasure keeps `ω(s_0), ω(s_1), …` where
//! `s_0` is the last visit to `ω(0)` and `s_{j+1}` is the last visit to
//! `ω(s_j + 1)`. With a table of last-visit indices that recursion runs in
//! `O(n)`.

mod exact;

pub use exact::{
    enumerated_walks, exact_lerw_distribution, fixed_time_lerw_distribution, fixed_time_reversed_lerw_distribution,
    laplacian_step_distribution, PathDistribution,
};

use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::lattice::{BallSpec, LatticePath, LatticePoint};
use crate::walk::{extend_until_exit, RandomStream, StepSource};

/// A nearest-neighbor path without repeated points.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<LatticePoint>", into = "Vec<LatticePoint>")]
pub struct SelfAvoidingPath {
    points: Vec<LatticePoint>,
}

impl SelfAvoidingPath {
    pub fn new(points: Vec<LatticePoint>) -> Result<Self> {
        let path = LatticePath::new(points)?;
        let mut seen = std::collections::HashSet::with_capacity(path.len());
        for &p in path.points() {
            if !seen.insert(p) {
                return Err(validation(format!("point {p} repeats in a self-avoiding path")));
            }
        }
        Ok(SelfAvoidingPath { points: path.into_points() })
    }

    pub(crate) fn from_trusted(points: Vec<LatticePoint>) -> Self {
        SelfAvoidingPath { points }
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<LatticePoint> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of steps.
    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn tip(&self) -> LatticePoint {
        *self.points.last().unwrap()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.points.contains(&p)
    }
}

impl TryFrom<Vec<LatticePoint>> for SelfAvoidingPath {
    type Error = crate::error::Error;
    fn try_from(points: Vec<LatticePoint>) -> Result<Self> {
        SelfAvoidingPath::new(points)
    }
}

impl From<SelfAvoidingPath> for Vec<LatticePoint> {
    fn from(p: SelfAvoidingPath) -> Self {
        p.points
    }
}

impl From<SelfAvoidingPath> for LatticePath {
    fn from(p: SelfAvoidingPath) -> Self {
        LatticePath::from_trusted(p.points)
    }
}

/// Scratch table of last-visit indices over a bounding box.
///
/// Entries for cells not on the current path are stale but never read, so
/// the table is reused across calls without clearing.
#[derive(Default)]
struct EraseScratch {
    table: Vec<u32>,
}

/// Dense tables beyond this many cells fall back to hashing.
const DENSE_CELL_LIMIT: usize = 1 << 24;

thread_local! {
    static ERASE_SCRATCH: RefCell<EraseScratch> = RefCell::new(EraseScratch::default());
    static WALK_BUFFER: RefCell<Vec<LatticePoint>> = const { RefCell::new(Vec::new()) };
}

/// Loop-erasure of an arbitrary non-empty point sequence, written into `out`.
///
/// The sequence is assumed nearest-neighbor; callers validate.
pub(crate) fn erase_into(points: &[LatticePoint], out: &mut Vec<LatticePoint>) {
    out.clear();
    let n = points.len();
    if n == 0 {
        return;
    }
    let (mut x0, mut x1, mut y0, mut y1) = (i32::MAX, i32::MIN, i32::MAX, i32::MIN);
    for p in points {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let w = (x1 - x0 + 1) as usize;
    let h = (y1 - y0 + 1) as usize;
    if w.saturating_mul(h) <= DENSE_CELL_LIMIT && n <= u32::MAX as usize {
        ERASE_SCRATCH.with(|s| {
            let table = &mut s.borrow_mut().table;
            if table.len() < w * h {
                table.resize(w * h, 0);
            }
            let cell = |p: &LatticePoint| (p.y - y0) as usize * w + (p.x - x0) as usize;
            for (k, p) in points.iter().enumerate() {
                table[cell(p)] = k as u32;
            }
            let mut i = 0usize;
            loop {
                i = table[cell(&points[i])] as usize;
                out.push(points[i]);
                if i == n - 1 {
                    break;
                }
                i += 1;
            }
        });
    } else {
        let mut last = HashMap::with_capacity(n);
        for (k, &p) in points.iter().enumerate() {
            last.insert(p, k);
        }
        let mut i = 0usize;
        loop {
            i = last[&points[i]];
            out.push(points[i]);
            if i == n - 1 {
                break;
            }
            i += 1;
        }
    }
}

/// Chronological loop-erasure `L(ω)`.
pub fn loop_erase(path: &LatticePath) -> SelfAvoidingPath {
    let mut out = Vec::new();
    erase_into(path.points(), &mut out);
    SelfAvoidingPath::from_trusted(out)
}

/// Loop-erasure of a raw point sequence, validating the nearest-neighbor property.
pub fn loop_erase_points(points: &[LatticePoint]) -> Result<SelfAvoidingPath> {
    let path = LatticePath::new(points.to_vec())?;
    Ok(loop_erase(&path))
}

/// Parameters of the finite-volume LERW measure `μ_{n,m}`: erase a walk
/// stopped at `∂C_m`, keep the initial segment up to `∂C_n`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LerwSampleConfig {
    pub inner_radius: f64,
    pub outer_radius: f64,
}

impl LerwSampleConfig {
    /// Requires `outer ≥ inner > 0`.
    pub fn new(inner_radius: f64, outer_radius: f64) -> Result<Self> {
        if !(inner_radius.is_finite() && inner_radius > 0.0) {
            return Err(validation(format!("inner radius must be positive, got {inner_radius}")));
        }
        if !(outer_radius >= inner_radius) || !outer_radius.is_finite() {
            return Err(validation(format!(
                "outer radius {outer_radius} must be at least the inner radius {inner_radius}"
            )));
        }
        Ok(LerwSampleConfig { inner_radius, outer_radius })
    }

    /// The default `μ_{n,2n}`.
    pub fn doubled(inner_radius: f64) -> Result<Self> {
        LerwSampleConfig::new(inner_radius, 2.0 * inner_radius)
    }
}

/// Samples the LERW (under `cfg`) and hands the truncated erased path to `f`
/// without allocating a fresh path.
pub fn with_lerw_sample<R>(
    cfg: &LerwSampleConfig,
    stream: RandomStream,
    f: impl FnOnce(&[LatticePoint]) -> R,
) -> Result<R> {
    let outer = BallSpec::new(cfg.outer_radius)?;
    let inner = BallSpec::new(cfg.inner_radius)?;
    WALK_BUFFER.with(|buf| {
        let mut buf = buf.borrow_mut();
        buf.clear();
        buf.push(LatticePoint::ORIGIN);
        let mut steps = StepSource::new(stream);
        extend_until_exit(&outer, &mut steps, &mut buf)?;
        let mut erased = Vec::new();
        erase_into(&buf, &mut erased);
        let cut = erased
            .iter()
            .position(|&p| !inner.contains(p))
            .expect("erased path ends outside the outer ball");
        erased.truncate(cut + 1);
        Ok(f(&erased))
    })
}

/// A sample of `μ_{n,m}`: an element of `Λ_n`.
pub fn sample_lerw(cfg: &LerwSampleConfig, stream: RandomStream) -> Result<SelfAvoidingPath> {
    with_lerw_sample(cfg, stream, |p| SelfAvoidingPath::from_trusted(p.to_vec()))
}

/// Whether `path` lies in `Λ_n`: starts at the origin, stays in `C_n` until
/// its last point, which lies on `∂C_n`.
pub fn in_lambda(points: &[LatticePoint], ball: &BallSpec) -> bool {
    match points.split_last() {
        Some((&last, body)) => {
            points[0].is_origin()
                && body.iter().all(|&p| ball.contains(p))
                && ball.on_boundary(last)
        }
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(v: &[(i32, i32)]) -> Vec<LatticePoint> {
        v.iter().map(|&(x, y)| LatticePoint::new(x, y)).collect()
    }

    #[test]
    fn erasure_examples() {
        let a = loop_erase_points(&pts(&[(0, 0), (1, 0), (0, 0), (0, 1)])).unwrap();
        assert_eq!(a.points(), pts(&[(0, 0), (0, 1)]).as_slice());
        let b = loop_erase_points(&pts(&[(0, 0), (1, 0), (1, 1), (0, 1), (0, 0), (1, 0)])).unwrap();
        assert_eq!(b.points(), pts(&[(0, 0), (1, 0)]).as_slice());
        let saw = pts(&[(0, 0), (0, 1), (1, 1), (1, 0), (2, 0)]);
        assert_eq!(loop_erase_points(&saw).unwrap().points(), saw.as_slice());
        assert_eq!(loop_erase_points(&pts(&[(5, 5)])).unwrap().points(), pts(&[(5, 5)]).as_slice());
    }

    #[test]
    fn erasure_rejects_jumps() {
        assert!(loop_erase_points(&pts(&[(0, 0), (2, 0)])).is_err());
    }

    #[test]
    fn self_avoiding_validation() {
        assert!(SelfAvoidingPath::new(pts(&[(0, 0), (1, 0), (0, 0)])).is_err());
        assert!(SelfAvoidingPath::new(pts(&[(0, 0), (1, 0), (1, 1)])).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(LerwSampleConfig::new(2.0, 1.0).is_err());
        assert!(LerwSampleConfig::new(0.0, 1.0).is_err());
        let c = LerwSampleConfig::doubled(3.0).unwrap();
        assert_eq!(c.outer_radius, 6.0);
    }

    #[test]
    fn samples_lie_in_lambda() {
        let cfg = LerwSampleConfig::doubled(9.5).unwrap();
        let ball = BallSpec::new(9.5).unwrap();
        let base = RandomStream::new(2, 3);
        for i in 0..300 {
            let s = sample_lerw(&cfg, base.derive(i)).unwrap();
            assert!(in_lambda(s.points(), &ball));
            assert!(SelfAvoidingPath::new(s.points().to_vec()).is_ok());
        }
        assert_eq!(sample_lerw(&cfg, base).unwrap(), sample_lerw(&cfg, base).unwrap());
    }

    #[test]
    fn radius_one_is_uniform_single_step() {
        let cfg = LerwSampleConfig::doubled(1.0).unwrap();
        let mut counts = HashMap::new();
        let base = RandomStream::new(8, 0);
        let n = 40_000;
        for i in 0..n {
            let s = sample_lerw(&cfg, base.derive(i)).unwrap();
            assert_eq!(s.len(), 2);
            *counts.entry(s.tip()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 4);
        let se = (0.1875 / n as f64).sqrt();
        for (_, c) in counts {
            assert!((c as f64 / n as f64 - 0.25).abs() < 3.0 * se);
        }
    }
}
