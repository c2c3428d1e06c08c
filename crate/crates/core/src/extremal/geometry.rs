//! Planar polylines and closed-segment intersection.

use serde::{Deserialize, Serialize};

pub type Point2 = [f64; 2];

/// A slit: a polyline removed from a domain. Every grid edge whose closed
/// segment meets the polyline is cut.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyline {
    pub points: Vec<Point2>,
}

impl Polyline {
    pub fn new(points: Vec<Point2>) -> Self {
        Polyline { points }
    }

    /// Closed regular polygon of `sides` vertices on the circle of `radius`.
    pub fn circle(radius: f64, sides: usize) -> Self {
        let pts = (0..=sides)
            .map(|k| {
                let t = std::f64::consts::TAU * (k % sides) as f64 / sides as f64;
                [radius * t.cos(), radius * t.sin()]
            })
            .collect();
        Polyline { points: pts }
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        self.points.windows(2).map(|w| (w[0], w[1]))
    }

    fn bbox(&self) -> [f64; 4] {
        self.points.iter().fold([f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY], |b, p| {
            [b[0].min(p[0]), b[1].min(p[1]), b[2].max(p[0]), b[3].max(p[1])]
        })
    }

    /// Whether the closed segment `[p, q]` meets the polyline.
    pub fn intersects(&self, p: Point2, q: Point2) -> bool {
        let b = self.bbox();
        if p[0].max(q[0]) < b[0] || p[0].min(q[0]) > b[2] || p[1].max(q[1]) < b[1] || p[1].min(q[1]) > b[3] {
            return false;
        }
        self.segments().any(|(a, c)| segments_intersect(p, q, a, c))
    }
}

fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: Point2, b: Point2, p: Point2) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

/// Intersection test for closed segments, including touching and collinear
/// overlap.
pub fn segments_intersect(p1: Point2, p2: Point2, q1: Point2, q2: Point2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}
