//! Discrete extremal length on grid-discretized planar domains.
//!
//! A [`GridDomain`] is a resistor network on the points of a square (or, for
//! the periodic log strip, rectangular) grid. Its extremal length between the
//! terminal sets `V1` and `V2` is the reciprocal of the Dirichlet energy of
//! the potential that is 0 on `V1`, 1 on `V2` and harmonic elsewhere.
//!
//! Circles enter as *discrete circles* `S(ρ)`: grid points `v` with
//! `|v| ≤ ρ` that have a grid neighbor outside radius `ρ`. Every grid path
//! that crosses radius `ρ` passes through `S(ρ)`, which is what makes the
//! discrete serial rule hold exactly on these networks. Slits are polylines;
//! every grid edge whose closed segment meets a slit is removed.

mod checks;
mod geometry;
mod network;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use network::Network;

pub use checks::{
    straight_ray,
    crooked_lerw_samples, escape_vs_crookedness, escape_vs_crookedness_from, pfluger_check, random_slits,
    serial_rule_check, EscapeBucket, EscapeRegression, EscapeSample, PflugerReport, SerialReport,
};
pub use geometry::{segments_intersect, Point2, Polyline};

/// Bound on the scaled residual of network solves.
pub const NETWORK_TOLERANCE: f64 = 1e-11;
/// Default mesh: 1/64 of the disk radius.
pub const DEFAULT_MESH: f64 = 1.0 / 64.0;
/// Grid points per feature required by [`build_domain`].
pub const MIN_CELLS_PER_FEATURE: f64 = 4.0;
const MAX_GRID_POINTS: usize = 16_000_000;

/// A planar shape with two distinguished boundary pieces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Shape {
    /// `(0, a) × (0, b)`; `V1` the left side, `V2` the right side.
    Rectangle { a: f64, b: f64 },
    /// The annulus `e^{-n} < |z| < 1` cut along the positive real axis;
    /// `V1` the inner circle, `V2` the outer circle.
    SplitAnnulus { n: f64 },
    /// The annulus `inner_radius < |z| < 1` minus the slits.
    SlitDisk { inner_radius: f64, slits: Vec<Polyline> },
    /// The strip `0 < x < width` with `y` periodic of period `2π` (the image
    /// of an annulus under the logarithm) minus the slits, given in strip
    /// coordinates; `V1` is `x = 0`, `V2` is `x = width`.
    LogStrip { width: f64, slits: Vec<Polyline> },
}

/// A resistor network on grid points with terminal sets `V1` and `V2`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    pub mesh: f64,
    pub vertices: Vec<Point2>,
    /// `(u, v, conductance)`.
    pub edges: Vec<(usize, usize, f64)>,
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModulusResult {
    /// `1 / energy`; `+∞` when no path joins `V1` to `V2`.
    pub extremal_length: f64,
    pub energy: f64,
    pub mesh: f64,
    /// Current into `V2`; equals `energy` up to the solver tolerance.
    pub flux: f64,
    pub connected: bool,
    pub unknowns: usize,
    pub iterations: usize,
}

/// Potential of a domain: `values[v]` for every vertex (NaN on vertices cut
/// off from both terminals).
#[derive(Clone, Debug)]
pub struct Potential {
    pub values: Vec<f64>,
    pub connected: bool,
    pub iterations: usize,
    unknowns: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Free,
    V1,
    V2,
}

/// Rectangular grid `(x0 + i hx, y0 + j hy)`, optionally periodic in `j`.
struct GridSpec {
    nx: usize,
    ny: usize,
    hx: f64,
    hy: f64,
    x0: f64,
    y0: f64,
    periodic_y: bool,
}

impl GridSpec {
    fn centered(radius: f64, h: f64) -> Result<GridSpec> {
        let k = (radius / h).ceil() as usize + 1;
        let n = 2 * k + 1;
        if n * n > MAX_GRID_POINTS {
            return Err(Error::Refused(format!("grid of {n}×{n} points")));
        }
        Ok(GridSpec { nx: n, ny: n, hx: h, hy: h, x0: -(k as f64) * h, y0: -(k as f64) * h, periodic_y: false })
    }

    fn point(&self, i: usize, j: usize) -> Point2 {
        [self.x0 + i as f64 * self.hx, self.y0 + j as f64 * self.hy]
    }

    fn assemble(&self, mesh: f64, slits: &[Polyline], role: impl Fn(usize, usize) -> Option<Role>) -> GridDomain {
        let mut index = vec![usize::MAX; self.nx * self.ny];
        let mut d = GridDomain { mesh, vertices: Vec::new(), edges: Vec::new(), v1: Vec::new(), v2: Vec::new() };
        for j in 0..self.ny {
            for i in 0..self.nx {
                if let Some(r) = role(i, j) {
                    let v = d.vertices.len();
                    index[j * self.nx + i] = v;
                    d.vertices.push(self.point(i, j));
                    match r {
                        Role::V1 => d.v1.push(v),
                        Role::V2 => d.v2.push(v),
                        Role::Free => {}
                    }
                }
            }
        }
        let (cx, cy) = (self.hy / self.hx, self.hx / self.hy);
        let cut = |p: Point2, q: Point2| slits.iter().any(|s| s.intersects(p, q));
        for j in 0..self.ny {
            for i in 0..self.nx {
                let a = index[j * self.nx + i];
                if a == usize::MAX {
                    continue;
                }
                let p = self.point(i, j);
                if i + 1 < self.nx {
                    let b = index[j * self.nx + i + 1];
                    if b != usize::MAX && !cut(p, self.point(i + 1, j)) {
                        d.edges.push((a, b, cx));
                    }
                }
                let up = if j + 1 < self.ny {
                    Some(j + 1)
                } else if self.periodic_y && self.ny > 2 {
                    Some(0)
                } else {
                    None
                };
                if let Some(ju) = up {
                    let b = index[ju * self.nx + i];
                    // The wrapped edge is tested in unwrapped coordinates.
                    let q = [p[0], p[1] + self.hy];
                    if b != usize::MAX && !cut(p, q) {
                        d.edges.push((a, b, cy));
                    }
                }
            }
        }
        d
    }
}

/// Discrete disk membership `|(i, j)| h ≤ ρ` on a centered grid.
struct DiscreteCircles {
    k: i64,
    h: f64,
}

impl DiscreteCircles {
    fn inside(&self, i: i64, j: i64, rho: f64) -> bool {
        let (x, y) = (i as f64 * self.h, j as f64 * self.h);
        x * x + y * y <= rho * rho * (1.0 + 1e-12)
    }

    /// `(i, j) ∈ S(ρ)`.
    fn on_circle(&self, i: i64, j: i64, rho: f64) -> bool {
        self.inside(i, j, rho)
            && [(1, 0), (-1, 0), (0, 1), (0, -1)].iter().any(|&(di, dj)| !self.inside(i + di, j + dj, rho))
    }

    fn coords(&self, i: usize, j: usize) -> (i64, i64) {
        (i as i64 - self.k, j as i64 - self.k)
    }
}

fn check_mesh(h: f64, feature: f64, what: &str) -> Result<()> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(validation(format!("mesh must be positive, got {h}")));
    }
    if feature / h < MIN_CELLS_PER_FEATURE * (1.0 - 1e-9) {
        return Err(validation(format!(
            "mesh {h} too coarse for {what} {feature}: need at least {MIN_CELLS_PER_FEATURE} cells"
        )));
    }
    Ok(())
}

/// Which part of the outer circle belongs to `V2` in an annular domain.
#[derive(Clone, Copy, Debug)]
pub(crate) enum OuterTerminal {
    Whole,
    /// Arc `{θ : dist(θ, 0) ≤ length/2}`; the rest of the circle is insulated.
    Arc(f64),
}

fn in_arc(p: Point2, arc: OuterTerminal) -> bool {
    match arc {
        OuterTerminal::Whole => true,
        OuterTerminal::Arc(len) => p[1].atan2(p[0]).abs() <= len / 2.0 + 1e-12,
    }
}

/// Points `S(r_in) ∪ {r_in < |v| ≤ r_out}` with `V1 = S(r_in)` and `V2` the
/// part of `S(r_out)` selected by `outer`.
pub(crate) fn annular_domain(
    r_in: f64,
    r_out: f64,
    slits: &[Polyline],
    h: f64,
    outer: OuterTerminal,
) -> Result<GridDomain> {
    if !(r_in > 0.0 && r_out > r_in) {
        return Err(validation(format!("annulus needs 0 < r_in < r_out, got {r_in}, {r_out}")));
    }
    check_mesh(h, r_in, "inner radius")?;
    check_mesh(h, r_out - r_in, "annulus width")?;
    let spec = GridSpec::centered(r_out, h)?;
    let circles = DiscreteCircles { k: ((spec.nx - 1) / 2) as i64, h };
    Ok(spec.assemble(h, slits, |i, j| {
        let (a, b) = circles.coords(i, j);
        if !circles.inside(a, b, r_out) {
            return None;
        }
        if circles.on_circle(a, b, r_out) {
            return Some(if in_arc(spec.point(i, j), outer) { Role::V2 } else { Role::Free });
        }
        if circles.on_circle(a, b, r_in) {
            return Some(Role::V1);
        }
        (!circles.inside(a, b, r_in)).then_some(Role::Free)
    }))
}

/// Disk `|v| ≤ 1` with the boundary circle split into `V2` (the arc) and `V1`
/// (the rest).
pub(crate) fn disk_with_arc(arc_length: f64, h: f64) -> Result<GridDomain> {
    check_mesh(h, 1.0, "radius")?;
    let spec = GridSpec::centered(1.0, h)?;
    let circles = DiscreteCircles { k: ((spec.nx - 1) / 2) as i64, h };
    Ok(spec.assemble(h, &[], |i, j| {
        let (a, b) = circles.coords(i, j);
        if !circles.inside(a, b, 1.0) {
            None
        } else if circles.on_circle(a, b, 1.0) {
            Some(if in_arc(spec.point(i, j), OuterTerminal::Arc(arc_length)) { Role::V2 } else { Role::V1 })
        } else {
            Some(Role::Free)
        }
    }))
}

fn grid_count(len: f64, h: f64, what: &str) -> Result<usize> {
    let cells = len / h;
    let n = cells.round();
    if (cells - n).abs() > 1e-6 * cells.max(1.0) {
        return Err(validation(format!("mesh {h} does not divide {what} {len}")));
    }
    Ok(n as usize)
}

/// Discretizes `shape` with mesh `h`.
pub fn build_domain(shape: &Shape, h: f64) -> Result<GridDomain> {
    match shape {
        Shape::Rectangle { a, b } => {
            if !(*a > 0.0 && *b > 0.0) {
                return Err(validation("rectangle sides must be positive"));
            }
            check_mesh(h, a.min(*b), "side")?;
            let (nx, ny) = (grid_count(*a, h, "width")? + 1, grid_count(*b, h, "height")? + 1);
            if nx * ny > MAX_GRID_POINTS {
                return Err(Error::Refused(format!("grid of {nx}×{ny} points")));
            }
            let spec = GridSpec { nx, ny, hx: h, hy: h, x0: 0.0, y0: 0.0, periodic_y: false };
            Ok(spec.assemble(h, &[], |i, _| {
                Some(if i == 0 {
                    Role::V1
                } else if i == nx - 1 {
                    Role::V2
                } else {
                    Role::Free
                })
            }))
        }
        Shape::SplitAnnulus { n } => {
            if !(*n > 0.0) {
                return Err(validation("split annulus needs n > 0"));
            }
            let r = (-n).exp();
            let cut = Polyline::new(vec![[r, 0.0], [1.0, 0.0]]);
            annular_domain(r, 1.0, &[cut], h, OuterTerminal::Whole)
        }
        Shape::SlitDisk { inner_radius, slits } => {
            annular_domain(*inner_radius, 1.0, slits, h, OuterTerminal::Whole)
        }
        Shape::LogStrip { width, slits } => {
            if !(*width > 0.0) {
                return Err(validation("strip width must be positive"));
            }
            check_mesh(h, *width, "strip width")?;
            let nx = (width / h).round().max(1.0) as usize;
            let ny = (TAU / h).round() as usize;
            let spec = GridSpec { nx: nx + 1, ny, hx: width / nx as f64, hy: TAU / ny as f64, x0: 0.0, y0: 0.0, periodic_y: true };
            if spec.nx * ny > MAX_GRID_POINTS {
                return Err(Error::Refused(format!("grid of {}×{ny} points", spec.nx)));
            }
            let mesh = spec.hx;
            Ok(spec.assemble(mesh, slits, |i, _| {
                Some(if i == 0 {
                    Role::V1
                } else if i == nx {
                    Role::V2
                } else {
                    Role::Free
                })
            }))
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut a: usize) -> usize {
        while self.0[a] != a {
            self.0[a] = self.0[self.0[a]];
            a = self.0[a];
        }
        a
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

impl GridDomain {
    fn roles(&self) -> Result<Vec<Role>> {
        if self.v1.is_empty() || self.v2.is_empty() {
            return Err(validation("both terminal sets must be non-empty"));
        }
        let mut roles = vec![Role::Free; self.vertices.len()];
        for &v in &self.v1 {
            roles[v] = Role::V1;
        }
        for &v in &self.v2 {
            if roles[v] == Role::V1 {
                return Err(validation(format!("vertex {v} lies in both terminal sets")));
            }
            roles[v] = Role::V2;
        }
        Ok(roles)
    }

    /// Whether some path of edges joins `V1` to `V2`.
    pub fn connected(&self) -> bool {
        self.roles().map(|roles| self.connectivity(&roles).0).unwrap_or(false)
    }

    /// `(connected, per-vertex flag "touches a terminal")`.
    fn connectivity(&self, roles: &[Role]) -> (bool, Vec<bool>) {
        let n = self.vertices.len();
        let mut uf = UnionFind((0..n).collect());
        let mut direct = false;
        for &(a, b, _) in &self.edges {
            match (roles[a], roles[b]) {
                (Role::Free, _) | (_, Role::Free) => uf.union(a, b),
                (Role::V1, Role::V2) | (Role::V2, Role::V1) => direct = true,
                _ => {}
            }
        }
        let mut touches = vec![[false; 2]; n];
        for &(a, b, _) in &self.edges {
            for (u, v) in [(a, b), (b, a)] {
                if roles[u] == Role::Free {
                    let r = uf.find(u);
                    match roles[v] {
                        Role::V1 => touches[r][0] = true,
                        Role::V2 => touches[r][1] = true,
                        Role::Free => {}
                    }
                }
            }
        }
        let connected = direct || touches.iter().any(|t| t[0] && t[1]);
        let keep = (0..n).map(|v| roles[v] != Role::Free || { let r = uf.find(v); touches[r][0] || touches[r][1] }).collect();
        (connected, keep)
    }

    /// Harmonic potential: 0 on `V1`, 1 on `V2`.
    pub fn potential(&self) -> Result<Potential> {
        let roles = self.roles()?;
        let (connected, keep) = self.connectivity(&roles);
        let n = self.vertices.len();
        let mut slot = vec![usize::MAX; n];
        let mut free = 0;
        for v in 0..n {
            if roles[v] == Role::Free && keep[v] {
                slot[v] = free;
                free += 1;
            }
        }
        let value = |r: Role| if r == Role::V2 { 1.0 } else { 0.0 };
        let mut edges = Vec::new();
        let mut links = Vec::new();
        for &(a, b, c) in &self.edges {
            match (slot[a], slot[b]) {
                (usize::MAX, usize::MAX) => {}
                (sa, usize::MAX) => links.push((sa, c, value(roles[b]))),
                (usize::MAX, sb) => links.push((sb, c, value(roles[a]))),
                (sa, sb) => edges.push((sa, sb, c)),
            }
        }
        let (x, iterations) = Network::new(free, &edges, &links).solve(NETWORK_TOLERANCE)?;
        let values = (0..n)
            .map(|v| match roles[v] {
                Role::Free if keep[v] => x[slot[v]],
                Role::Free => f64::NAN,
                r => value(r),
            })
            .collect();
        Ok(Potential { values, connected, iterations, unknowns: free })
    }

    /// Index of the vertex nearest to `p`.
    pub fn nearest_vertex(&self, p: Point2) -> Option<usize> {
        let d = |q: &Point2| (q[0] - p[0]).powi(2) + (q[1] - p[1]).powi(2);
        (0..self.vertices.len()).min_by(|&a, &b| d(&self.vertices[a]).total_cmp(&d(&self.vertices[b])))
    }
}

/// `Δ(D, V1, V2)` as the reciprocal Dirichlet energy of the connecting
/// potential; `+∞` when `V1` and `V2` are disconnected.
pub fn extremal_length(domain: &GridDomain) -> Result<ModulusResult> {
    let pot = domain.potential()?;
    let u = &pot.values;
    if !pot.connected {
        return Ok(ModulusResult {
            extremal_length: f64::INFINITY,
            energy: 0.0,
            mesh: domain.mesh,
            flux: 0.0,
            connected: false,
            unknowns: pot.unknowns,
            iterations: pot.iterations,
        });
    }
    let v2: std::collections::HashSet<usize> = domain.v2.iter().copied().collect();
    let mut energy = 0.0;
    let mut flux = 0.0;
    for &(a, b, c) in &domain.edges {
        let du = u[a] - u[b];
        if du.is_nan() {
            continue;
        }
        energy += c * du * du;
        match (v2.contains(&a), v2.contains(&b)) {
            (true, false) => flux += c * du,
            (false, true) => flux -= c * du,
            _ => {}
        }
    }
    if !(energy > 0.0) {
        return Err(Error::Numeric("connected domain with zero energy".into()));
    }
    Ok(ModulusResult {
        extremal_length: 1.0 / energy,
        energy,
        mesh: domain.mesh,
        flux,
        connected: true,
        unknowns: pot.unknowns,
        iterations: pot.iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn rectangle_grid_counts() {
        let d = build_domain(&Shape::Rectangle { a: 2.0, b: 1.0 }, 0.25).unwrap();
        assert_eq!(d.vertices.len(), 45);
        assert_eq!(d.v1.len(), 5);
        assert_eq!(d.v2.len(), 5);
        assert!(d.v1.iter().all(|&v| d.vertices[v][0] == 0.0));
        assert!(d.v2.iter().all(|&v| d.vertices[v][0] == 2.0));
        assert_eq!(d.edges.len(), 8 * 5 + 9 * 4);
    }

    #[test]
    fn rectangle_values() {
        let m = extremal_length(&build_domain(&Shape::Rectangle { a: 2.0, b: 1.0 }, DEFAULT_MESH).unwrap()).unwrap();
        assert!((m.extremal_length / 2.0 - 1.0).abs() < 0.02, "{m:?}");
        assert_eq!(m.extremal_length * m.energy, 1.0);
        assert!((m.flux - m.energy).abs() < 1e-8 * m.energy);
        let sq = extremal_length(&build_domain(&Shape::Rectangle { a: 1.0, b: 1.0 }, DEFAULT_MESH).unwrap()).unwrap();
        assert!((sq.extremal_length - 1.0).abs() < 0.02);
    }

    #[test]
    fn split_annulus_is_connected_with_two_circles() {
        let d = build_domain(&Shape::SplitAnnulus { n: 1.0 }, DEFAULT_MESH).unwrap();
        assert!(d.connected());
        let r = |v: &usize| (d.vertices[*v][0].powi(2) + d.vertices[*v][1].powi(2)).sqrt();
        assert!(d.v1.iter().all(|v| r(v) <= (-1f64).exp() + 1e-12));
        assert!(d.v2.iter().all(|v| r(v) > 1.0 - 2.0 * DEFAULT_MESH && r(v) <= 1.0));
    }

    #[test]
    fn enclosing_slit_disconnects() {
        let ring = Polyline::circle(0.6, 64);
        let d = build_domain(&Shape::SlitDisk { inner_radius: 0.3, slits: vec![ring] }, DEFAULT_MESH).unwrap();
        assert!(!d.connected());
        let m = extremal_length(&d).unwrap();
        assert!(m.extremal_length.is_infinite() && !m.connected);
    }

    #[test]
    fn log_strip_matches_annulus_modulus() {
        let m = extremal_length(&build_domain(&Shape::LogStrip { width: 1.0, slits: vec![] }, 1.0 / 32.0).unwrap()).unwrap();
        assert!((m.extremal_length - 1.0 / (2.0 * PI)).abs() < 1e-9, "{m:?}");
    }

    #[test]
    fn coarse_mesh_is_rejected() {
        assert!(build_domain(&Shape::Rectangle { a: 1.0, b: 1.0 }, 0.3).is_err());
        assert!(build_domain(&Shape::SplitAnnulus { n: 3.0 }, 1.0 / 32.0).is_err());
    }

    #[test]
    fn overlapping_terminals_rejected() {
        let d = GridDomain { mesh: 1.0, vertices: vec![[0.0, 0.0]], edges: vec![], v1: vec![0], v2: vec![0] };
        assert!(extremal_length(&d).is_err());
    }
}
