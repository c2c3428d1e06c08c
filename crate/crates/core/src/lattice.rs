//! Geometry of the integer lattice Z²: points, norms and arguments, the
//! discrete balls `C_r = {p : |p| < r}` and their outer boundaries
//! `∂C_r = {p ∉ C_r : p has a unit neighbor in C_r}`.
//!
//! Ball membership compares the exact integer squared norm against `r²`, so
//! classification never depends on a rounded square root.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

/// A point of Z².
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticePoint {
    pub x: i32,
    pub y: i32,
}

/// The four unit steps in decoding order: +e₁, −e₁, +e₂, −e₂.
pub const UNIT_STEPS: [LatticePoint; 4] = [
    LatticePoint { x: 1, y: 0 },
    LatticePoint { x: -1, y: 0 },
    LatticePoint { x: 0, y: 1 },
    LatticePoint { x: 0, y: -1 },
];

impl LatticePoint {
    pub const ORIGIN: LatticePoint = LatticePoint { x: 0, y: 0 };

    pub const fn new(x: i32, y: i32) -> Self {
        LatticePoint { x, y }
    }

    /// Exact squared Euclidean norm.
    #[inline]
    pub fn norm_sq(self) -> i64 {
        let (x, y) = (self.x as i64, self.y as i64);
        x * x + y * y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        (self.norm_sq() as f64).sqrt()
    }

    pub fn is_origin(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// The four nearest neighbors, in the order of [`UNIT_STEPS`].
    #[inline]
    pub fn neighbors(self) -> [LatticePoint; 4] {
        UNIT_STEPS.map(|e| self + e)
    }

    #[inline]
    pub fn is_adjacent(self, other: LatticePoint) -> bool {
        (self.x - other.x).abs() + (self.y - other.y).abs() == 1
    }
}

impl std::ops::Add for LatticePoint {
    type Output = LatticePoint;
    #[inline]
    fn add(self, rhs: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl std::ops::Sub for LatticePoint {
    type Output = LatticePoint;
    #[inline]
    fn sub(self, rhs: LatticePoint) -> LatticePoint {
        LatticePoint::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Planar argument of `p` in `(−π, π]`.
pub fn argument(p: LatticePoint) -> Result<f64> {
    if p.is_origin() {
        return Err(validation("argument of the origin is undefined"));
    }
    // atan2 returns −π for (negative x, −0.0); integer inputs never produce −0.0.
    Ok((p.y as f64).atan2(p.x as f64))
}

/// Distance between two angles on the circle, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).abs().rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// The discrete ball `C_r` of real radius `r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallSpec {
    radius: f64,
    radius_sq: f64,
}

impl BallSpec {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(validation(format!("ball radius must be positive, got {radius}")));
        }
        Ok(BallSpec { radius, radius_sq: radius * radius })
    }

    /// `C^k`, the ball of radius `e^k`.
    pub fn exponential(k: u32) -> Result<Self> {
        BallSpec::new((k as f64).exp())
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Half-width of a square box that contains `C_r ∪ ∂C_r`.
    pub fn box_half_width(&self) -> i32 {
        self.radius.ceil() as i32
    }

    #[inline]
    pub fn contains(&self, p: LatticePoint) -> bool {
        (p.norm_sq() as f64) < self.radius_sq
    }

    #[inline]
    pub fn on_boundary(&self, p: LatticePoint) -> bool {
        !self.contains(p) && p.neighbors().iter().any(|&q| self.contains(q))
    }

    /// All interior points, in row-major order (y, then x).
    pub fn interior_points(&self) -> Vec<LatticePoint> {
        let r = self.box_half_width();
        let mut out = Vec::new();
        for y in -r..=r {
            for x in -r..=r {
                let p = LatticePoint::new(x, y);
                if self.contains(p) {
                    out.push(p);
                }
            }
        }
        out
    }

    /// `∂C_r`: points outside the ball with a unit neighbor inside it.
    pub fn boundary_points(&self) -> BTreeSet<LatticePoint> {
        let r = self.box_half_width() + 1;
        let mut out = BTreeSet::new();
        for y in -r..=r {
            for x in -r..=r {
                let p = LatticePoint::new(x, y);
                if self.on_boundary(p) {
                    out.insert(p);
                }
            }
        }
        out
    }
}

/// A non-empty nearest-neighbor path.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<LatticePoint>", into = "Vec<LatticePoint>")]
pub struct LatticePath {
    points: Vec<LatticePoint>,
}

impl LatticePath {
    pub fn new(points: Vec<LatticePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(validation("a path needs at least one point"));
        }
        if let Some(w) = points.windows(2).position(|w| !w[0].is_adjacent(w[1])) {
            return Err(validation(format!(
                "step {} from {} to {} is not a unit step",
                w,
                points[w],
                points[w + 1]
            )));
        }
        Ok(LatticePath { points })
    }

    /// Caller guarantees the nearest-neighbor property.
    pub(crate) fn from_trusted(points: Vec<LatticePoint>) -> Self {
        debug_assert!(!points.is_empty());
        LatticePath { points }
    }

    pub fn points(&self) -> &[LatticePoint] {
        &self.points
    }

    pub fn into_points(self) -> Vec<LatticePoint> {
        self.points
    }

    /// Number of points, one more than the number of steps.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn steps(&self) -> usize {
        self.points.len() - 1
    }

    pub fn start(&self) -> LatticePoint {
        self.points[0]
    }

    pub fn end(&self) -> LatticePoint {
        *self.points.last().unwrap()
    }
}

impl TryFrom<Vec<LatticePoint>> for LatticePath {
    type Error = crate::error::Error;
    fn try_from(points: Vec<LatticePoint>) -> Result<Self> {
        LatticePath::new(points)
    }
}

impl From<LatticePath> for Vec<LatticePoint> {
    fn from(p: LatticePath) -> Self {
        p.points
    }
}

/// Smallest index whose point lies outside `C_r`, if any.
pub fn first_exit_index(points: &[LatticePoint], ball: &BallSpec) -> Option<usize> {
    points.iter().position(|&p| !ball.contains(p))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: i32, y: i32) -> LatticePoint {
        LatticePoint::new(x, y)
    }

    #[test]
    fn argument_axis_points() {
        assert_eq!(argument(p(0, 1)).unwrap(), PI / 2.0);
        assert_eq!(argument(p(1, 0)).unwrap(), 0.0);
        assert_eq!(argument(p(-1, 0)).unwrap(), PI);
        assert!(argument(p(0, 0)).is_err());
    }

    #[test]
    fn angular_distance_examples() {
        assert!((angular_distance(0.0, PI / 2.0) - PI / 2.0).abs() < 1e-15);
        assert!((angular_distance(-3.0, 3.0) - (2.0 * PI - 6.0)).abs() < 1e-12);
        assert_eq!(angular_distance(1.234, 1.234), 0.0);
        assert!((angular_distance(-PI + 0.01, PI - 0.01) - 0.02).abs() < 1e-12);
    }

    #[test]
    fn boundary_of_small_balls() {
        let unit: BTreeSet<_> = [p(1, 0), p(-1, 0), p(0, 1), p(0, -1)].into();
        assert_eq!(BallSpec::new(1.0).unwrap().boundary_points(), unit);
        assert_eq!(BallSpec::new(0.5).unwrap().boundary_points(), unit);

        // Enumerate a bounding box independently of `on_boundary`.
        let mut expected = BTreeSet::new();
        for x in -4..=4 {
            for y in -4..=4 {
                let q = p(x, y);
                let inside = |a: LatticePoint| a.x * a.x + a.y * a.y < 4;
                if !inside(q) && q.neighbors().iter().any(|&n| inside(n)) {
                    expected.insert(q);
                }
            }
        }
        let got = BallSpec::new(2.0).unwrap().boundary_points();
        assert_eq!(got, expected);
        assert_eq!(got.len(), 12);
        for q in [p(2, 0), p(-2, 0), p(0, 2), p(0, -2), p(1, 2), p(-1, -2), p(2, 1), p(-2, 1)] {
            assert!(got.contains(&q), "{q}");
        }
    }

    #[test]
    fn invalid_radius() {
        assert!(BallSpec::new(0.0).is_err());
        assert!(BallSpec::new(f64::NAN).is_err());
    }

    #[test]
    fn first_exit_examples() {
        let b1 = BallSpec::new(1.0).unwrap();
        let b2 = BallSpec::new(2.0).unwrap();
        assert_eq!(first_exit_index(&[p(0, 0), p(1, 0)], &b1), Some(1));
        assert_eq!(first_exit_index(&[p(0, 0)], &b1), None);
        let path = [p(0, 0), p(0, 1), p(0, 0), p(1, 0), p(2, 0)];
        assert_eq!(first_exit_index(&path, &b2), Some(4));
    }

    #[test]
    fn path_validation() {
        assert!(LatticePath::new(vec![]).is_err());
        assert!(LatticePath::new(vec![p(0, 0), p(1, 1)]).is_err());
        assert!(LatticePath::new(vec![p(0, 0), p(0, 0)]).is_err());
        let path = LatticePath::new(vec![p(0, 0), p(0, 1)]).unwrap();
        assert_eq!(path.steps(), 1);
        let json = serde_json::to_string(&path).unwrap();
        assert!(serde_json::from_str::<LatticePath>(r#"[{"x":0,"y":0},{"x":2,"y":0}]"#).is_err());
        assert_eq!(serde_json::from_str::<LatticePath>(&json).unwrap(), path);
    }
}
