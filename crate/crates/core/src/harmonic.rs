//! Discrete harmonic functions on `C_n` minus an obstacle.
//!
//! `h_{A,n}(x) = P^x{S reaches ∂C_n ∖ A before hitting A}` solves the lattice
//! Laplace equation on `C_n ∖ A` with `h = 0` on `A` and `h = 1` on `∂C_n ∖ A`.
//! Obstacle points on `∂C_n` absorb at zero: the exit step itself counts as a
//! visit. Escape probabilities, avoidance probabilities `f_m(x, ω)` and the
//! random variable `X_n` are all read off such solutions.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::lattice::{BallSpec, LatticePoint};
use crate::looperase::{in_lambda, with_lerw_sample, LerwSampleConfig, SelfAvoidingPath};
use crate::solver::{GridSystem, Solution, DEFAULT_TOLERANCE};
use crate::stats::MeanEstimate;
use crate::walk::{RandomStream, StepSource};

/// A finite set of lattice points that absorbs the walk.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ObstacleSet {
    points: HashSet<LatticePoint>,
}

impl ObstacleSet {
    pub fn new(points: impl IntoIterator<Item = LatticePoint>) -> Self {
        ObstacleSet { points: points.into_iter().collect() }
    }

    pub fn empty() -> Self {
        ObstacleSet::default()
    }

    pub fn contains(&self, p: LatticePoint) -> bool {
        self.points.contains(&p)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &LatticePoint> {
        self.points.iter()
    }

    /// `A ∖ {0}`.
    pub fn without_origin(&self) -> ObstacleSet {
        ObstacleSet { points: self.points.iter().copied().filter(|p| !p.is_origin()).collect() }
    }

    pub fn is_subset(&self, other: &ObstacleSet) -> bool {
        self.points.is_subset(&other.points)
    }
}

impl FromIterator<LatticePoint> for ObstacleSet {
    fn from_iter<T: IntoIterator<Item = LatticePoint>>(iter: T) -> Self {
        ObstacleSet::new(iter)
    }
}

/// Which linear solver backs a Dirichlet solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SolverKind {
    /// Preconditioned conjugate gradients.
    #[default]
    Iterative,
    /// Dense LU; only for small radii.
    Dense,
}

/// Values of a harmonic function on `C_n ∪ ∂C_n`.
#[derive(Clone, Debug)]
pub struct GridField {
    radius: f64,
    offset: i32,
    width: usize,
    values: Vec<f64>,
    absorbing: Vec<bool>,
    pub iterations: usize,
    pub scaled_residual: f64,
}

impl GridField {
    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn cell(&self, p: LatticePoint) -> Option<usize> {
        let (i, j) = (p.x + self.offset, p.y + self.offset);
        if i < 0 || j < 0 || i as usize >= self.width || j as usize >= self.width {
            return None;
        }
        Some(j as usize * self.width + i as usize)
    }

    /// `h(p)` for `p ∈ C_n ∪ ∂C_n`; `None` elsewhere.
    pub fn get(&self, p: LatticePoint) -> Option<f64> {
        self.cell(p).map(|c| self.values[c]).filter(|v| !v.is_nan())
    }

    /// `|h(p) − mean of h over the four neighbors|` at a free interior point.
    pub fn mean_value_defect(&self, p: LatticePoint) -> Option<f64> {
        let c = self.cell(p)?;
        if self.absorbing[c] || self.values[c].is_nan() {
            return None;
        }
        let ball = BallSpec::new(self.radius).ok()?;
        if !ball.contains(p) {
            return None;
        }
        let avg: f64 = p.neighbors().iter().map(|&q| self.get(q).unwrap()).sum::<f64>() / 4.0;
        Some((self.values[c] - avg).abs())
    }

    /// Free interior points, the vertices where the mean-value property must hold.
    pub fn free_points(&self) -> Vec<LatticePoint> {
        let ball = BallSpec::new(self.radius).unwrap();
        ball.interior_points()
            .into_iter()
            .filter(|&p| self.cell(p).is_some_and(|c| !self.absorbing[c]))
            .collect()
    }
}

/// Lattice domain `C_n` on a padded square grid with a blocked-cell mask.
struct LatticeDomain {
    ball: BallSpec,
    offset: i32,
    width: usize,
    blocked: Vec<bool>,
}

impl LatticeDomain {
    fn new(n: f64, obstacle: impl IntoIterator<Item = LatticePoint>) -> Result<Self> {
        if !(n >= 1.0) {
            return Err(validation(format!("radius must be at least 1, got {n}")));
        }
        let ball = BallSpec::new(n)?;
        let offset = ball.box_half_width() + 1;
        let width = (2 * offset + 1) as usize;
        let mut d = LatticeDomain { ball, offset, width, blocked: vec![false; width * width] };
        for p in obstacle {
            if let Some(c) = d.cell(p) {
                d.blocked[c] = true;
            }
        }
        Ok(d)
    }

    #[inline]
    fn cell(&self, p: LatticePoint) -> Option<usize> {
        let (i, j) = (p.x + self.offset, p.y + self.offset);
        if i < 0 || j < 0 || i as usize >= self.width || j as usize >= self.width {
            return None;
        }
        Some(j as usize * self.width + i as usize)
    }

    #[inline]
    fn point(&self, c: usize) -> LatticePoint {
        LatticePoint::new((c % self.width) as i32 - self.offset, (c / self.width) as i32 - self.offset)
    }

    fn system(&self) -> GridSystem {
        let w = self.width;
        let mut sys = GridSystem::new(w, w);
        let free = |c: usize| !self.blocked[c] && self.ball.contains(self.point(c));
        for c in 0..w * w {
            if free(c) {
                sys.set_active(c);
            }
        }
        for c in 0..w * w {
            if !sys.is_active(c) {
                continue;
            }
            for (nb, dir) in [(c + 1, 0u8), (c - 1, 1), (c + w, 2), (c - w, 3)] {
                if sys.is_active(nb) {
                    match dir {
                        0 => sys.couple_east(c, 1.0),
                        2 => sys.couple_north(c, 1.0),
                        _ => {}
                    }
                } else {
                    let value = if self.blocked[nb] { 0.0 } else { 1.0 };
                    sys.couple_fixed(c, 1.0, value);
                }
            }
        }
        sys
    }

    fn solve(&self, kind: SolverKind) -> Result<(Solution, GridSystem)> {
        let sys = self.system();
        let sol = match kind {
            SolverKind::Iterative => sys.solve(DEFAULT_TOLERANCE)?,
            SolverKind::Dense => sys.solve_dense()?,
        };
        Ok((sol, sys))
    }

    /// Value of `h` at a point of `C_n ∪ ∂C_n` given the solution.
    #[inline]
    fn value(&self, sol: &Solution, p: LatticePoint) -> f64 {
        let c = self.cell(p).expect("point inside the grid");
        if self.blocked[c] {
            0.0
        } else if self.ball.contains(p) {
            sol.values[c]
        } else {
            1.0
        }
    }

    fn escape(&self, kind: SolverKind) -> Result<f64> {
        if !self.blocked.iter().any(|&b| b) {
            // Nothing to hit: the walk escapes surely.
            return Ok(1.0);
        }
        let (sol, _) = self.solve(kind)?;
        Ok(LatticePoint::ORIGIN.neighbors().iter().map(|&e| self.value(&sol, e)).sum::<f64>() / 4.0)
    }
}

/// Solves for `h_{A,n}` on `C_n ∪ ∂C_n`.
pub fn dirichlet_solve(n: f64, obstacle: &ObstacleSet) -> Result<GridField> {
    dirichlet_solve_with(n, obstacle, SolverKind::Iterative)
}

pub fn dirichlet_solve_with(n: f64, obstacle: &ObstacleSet, kind: SolverKind) -> Result<GridField> {
    let dom = LatticeDomain::new(n, obstacle.iter().copied())?;
    let (sol, _) = dom.solve(kind)?;
    let mut values = vec![f64::NAN; dom.width * dom.width];
    let mut absorbing = vec![false; dom.width * dom.width];
    for c in 0..values.len() {
        let p = dom.point(c);
        if dom.ball.contains(p) || dom.ball.on_boundary(p) {
            values[c] = dom.value(&sol, p);
            absorbing[c] = dom.blocked[c] || !dom.ball.contains(p);
        }
    }
    Ok(GridField {
        radius: n,
        offset: dom.offset,
        width: dom.width,
        values,
        absorbing,
        iterations: sol.iterations,
        scaled_residual: sol.scaled_residual,
    })
}

/// `Es_n(A) = P{S(0, σ_n] ∩ A = ∅}` for a walk from the origin.
pub fn escape_probability(obstacle: &ObstacleSet, n: f64) -> Result<f64> {
    LatticeDomain::new(n, obstacle.iter().copied())?.escape(SolverKind::Iterative)
}

/// [`escape_probability`] for an obstacle given as a point list.
pub fn escape_probability_of(points: &[LatticePoint], n: f64) -> Result<f64> {
    LatticeDomain::new(n, points.iter().copied())?.escape(SolverKind::Iterative)
}

/// `f_m(x, ω) = P^x{S[0, σ_m] ∩ ω = ∅}`.
pub fn avoidance_probability(x: LatticePoint, path: &SelfAvoidingPath, m: f64) -> Result<f64> {
    let ball = BallSpec::new(m)?;
    if !(ball.contains(x) || ball.on_boundary(x)) {
        return Err(validation(format!("{x} is not in C_{m} or on its boundary")));
    }
    if path.contains(x) {
        return Ok(0.0);
    }
    if !ball.contains(x) {
        return Ok(1.0);
    }
    let dom = LatticeDomain::new(m, path.points().iter().copied())?;
    let (sol, _) = dom.solve(SolverKind::Iterative)?;
    Ok(dom.value(&sol, x))
}

/// Avoidance probabilities of all four neighbors of `tip` against `path`,
/// from a single solve. Order follows [`crate::lattice::UNIT_STEPS`].
pub(crate) fn neighbor_avoidance(path: &[LatticePoint], tip: LatticePoint, m: f64, kind: SolverKind) -> Result<[f64; 4]> {
    let dom = LatticeDomain::new(m, path.iter().copied())?;
    let (sol, _) = dom.solve(kind)?;
    Ok(tip.neighbors().map(|x| dom.value(&sol, x)))
}

/// `X_n = Es_n(L)` for `L ∈ Λ_n`, or `X'_n = Es_n(L ∖ {0})` with `drop_origin`.
pub fn x_n_exact(path: &SelfAvoidingPath, n: f64, drop_origin: bool) -> Result<f64> {
    let ball = BallSpec::new(n)?;
    if !in_lambda(path.points(), &ball) {
        return Err(validation("path is not in Λ_n"));
    }
    x_n_points(path.points(), n, drop_origin)
}

fn x_n_points(points: &[LatticePoint], n: f64, drop_origin: bool) -> Result<f64> {
    let obstacle = points.iter().copied().filter(|p| !(drop_origin && p.is_origin()));
    LatticeDomain::new(n, obstacle)?.escape(SolverKind::Iterative)
}

/// `samples` independent draws of `X_n` (or `X'_n`) under the LERW measure `cfg`.
/// Sample `i` uses `stream.derive(i)`.
pub fn x_n_samples(cfg: &LerwSampleConfig, samples: usize, stream: RandomStream, drop_origin: bool) -> Result<Vec<f64>> {
    let n = cfg.inner_radius;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| with_lerw_sample(cfg, stream.derive(i), |pts| x_n_points(pts, n, drop_origin))?)
        .collect()
}

/// Estimate of `E[X_n^k]` with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
    pub n: f64,
    pub power: u32,
}

impl MomentEstimate {
    pub fn from_samples(xs: &[f64], n: f64, power: u32) -> MomentEstimate {
        let powered: Vec<f64> = xs.iter().map(|x| x.powi(power as i32)).collect();
        let e = MeanEstimate::from_values(&powered);
        MomentEstimate { value: e.mean, stderr: e.stderr, samples: e.samples, n, power }
    }

    pub fn as_mean(&self) -> MeanEstimate {
        MeanEstimate { mean: self.value, stderr: self.stderr, samples: self.samples }
    }
}

fn check_moment_args(power: u32, samples: usize) -> Result<()> {
    if !(1..=3).contains(&power) {
        return Err(validation(format!("power must be 1, 2 or 3, got {power}")));
    }
    if samples < 2 {
        return Err(validation("at least two samples are needed for a standard error"));
    }
    Ok(())
}

/// `E[X_n^k]` under `μ_{n,2n}`, one exact solve per sampled path.
pub fn moment_estimate(n: f64, power: u32, samples: usize, stream: RandomStream, drop_origin: bool) -> Result<MomentEstimate> {
    moment_estimate_with(&LerwSampleConfig::doubled(n)?, power, samples, stream, drop_origin)
}

pub fn moment_estimate_with(
    cfg: &LerwSampleConfig,
    power: u32,
    samples: usize,
    stream: RandomStream,
    drop_origin: bool,
) -> Result<MomentEstimate> {
    check_moment_args(power, samples)?;
    let xs = x_n_samples(cfg, samples, stream, drop_origin)?;
    Ok(MomentEstimate::from_samples(&xs, cfg.inner_radius, power))
}

/// Bernoulli estimate of `P{Θ_n ∩ (L ∖ {0}) = ∅}`: one loop-erased source path
/// and three independent walks that must avoid it up to `∂C_n`.
pub fn third_moment_via_walks(n: f64, samples: usize, stream: RandomStream) -> Result<MomentEstimate> {
    third_moment_via_walks_with(&LerwSampleConfig::doubled(n)?, samples, stream)
}

pub fn third_moment_via_walks_with(cfg: &LerwSampleConfig, samples: usize, stream: RandomStream) -> Result<MomentEstimate> {
    check_moment_args(3, samples)?;
    let n = cfg.inner_radius;
    let ball = BallSpec::new(n)?;
    let offset = ball.box_half_width() + 1;
    let width = (2 * offset + 1) as usize;
    let cell = move |p: LatticePoint| (p.y + offset) as usize * width + (p.x + offset) as usize;
    let hits: Vec<bool> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let s = stream.derive(i);
            let mut mask = vec![false; width * width];
            with_lerw_sample(cfg, s.derive(0), |pts| {
                for &p in pts.iter().filter(|p| !p.is_origin()) {
                    mask[cell(p)] = true;
                }
            })?;
            let avoided = (1..=3u64).all(|j| {
                let mut steps = StepSource::new(s.derive(j));
                let mut cur = LatticePoint::ORIGIN;
                while ball.contains(cur) {
                    cur = cur + crate::lattice::UNIT_STEPS[steps.next_direction()];
                    if mask[cell(cur)] {
                        return false;
                    }
                }
                true
            });
            Ok(avoided)
        })
        .collect::<Result<_>>()?;
    let e = MeanEstimate::from_indicators(hits);
    Ok(MomentEstimate { value: e.mean, stderr: e.stderr, samples: e.samples, n, power: 3 })
}
