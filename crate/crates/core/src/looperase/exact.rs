//! Exact small-instance LERW distributions.
//!
//! LERW from the origin to `∂C_m` is the Laplacian random walk: given the path
//! `ω` so far, the next point is a neighbor `x` of the tip with probability
//! proportional to `f_m(x, ω)`. Enumerating that tree gives the exact law of
//! the initial segment in `Λ_n`, which the Monte Carlo sampler is checked
//! against.

use std::collections::BTreeMap;

use crate::error::{validation, Error, Result};
use crate::harmonic::{neighbor_avoidance, SolverKind};
use crate::lattice::{BallSpec, LatticePath, LatticePoint, UNIT_STEPS};

use super::{erase_into, LerwSampleConfig, SelfAvoidingPath};

/// Probability mass over self-avoiding paths.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PathDistribution {
    pub probabilities: BTreeMap<SelfAvoidingPath, f64>,
}

impl PathDistribution {
    pub fn total(&self) -> f64 {
        self.probabilities.values().sum()
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn get(&self, path: &SelfAvoidingPath) -> f64 {
        self.probabilities.get(path).copied().unwrap_or(0.0)
    }

    /// Total-variation distance to an empirical distribution given by counts.
    pub fn total_variation_to_counts(&self, counts: &BTreeMap<SelfAvoidingPath, u64>) -> f64 {
        let total: u64 = counts.values().sum();
        let mut tv = 0.0;
        for (path, &p) in &self.probabilities {
            let q = counts.get(path).copied().unwrap_or(0) as f64 / total as f64;
            tv += (p - q).abs();
        }
        for (path, &c) in counts {
            if !self.probabilities.contains_key(path) {
                tv += c as f64 / total as f64;
            }
        }
        0.5 * tv
    }
}

const SMALL_SOLVE_RADIUS: f64 = 8.0;

/// Next-step law of the Laplacian walk toward `∂C_m`, over the tip's neighbors
/// in [`UNIT_STEPS`] order. Neighbors on the path get zero weight.
pub fn laplacian_step_distribution(path: &SelfAvoidingPath, m: f64) -> Result<[f64; 4]> {
    let ball = BallSpec::new(m)?;
    if !path.points()[0].is_origin() {
        return Err(validation("path must start at the origin"));
    }
    let tip = path.tip();
    if !ball.contains(tip) {
        return Err(validation(format!("tip {tip} is not inside C_{m}")));
    }
    step_weights(path.points(), m)
}

fn step_weights(points: &[LatticePoint], m: f64) -> Result<[f64; 4]> {
    let tip = *points.last().unwrap();
    let kind = if m <= SMALL_SOLVE_RADIUS { SolverKind::Dense } else { SolverKind::Iterative };
    let w = neighbor_avoidance(points, tip, m, kind)?;
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return Err(Error::Enclosed(tip));
    }
    Ok(w.map(|x| x / total))
}

/// Exact law of the LERW segment in `Λ_n` under `μ_{n,m}`. Limited to `n ≤ 3`.
pub fn exact_lerw_distribution(cfg: &LerwSampleConfig) -> Result<PathDistribution> {
    if cfg.inner_radius > 3.0 {
        return Err(Error::Refused(format!(
            "exact enumeration is limited to n ≤ 3, got {}",
            cfg.inner_radius
        )));
    }
    let inner = BallSpec::new(cfg.inner_radius)?;
    let mut out = BTreeMap::new();
    let mut stack = vec![(vec![LatticePoint::ORIGIN], 1.0f64)];
    while let Some((path, prob)) = stack.pop() {
        let w = step_weights(&path, cfg.outer_radius)?;
        let tip = *path.last().unwrap();
        for (k, e) in UNIT_STEPS.iter().enumerate() {
            if w[k] <= 0.0 {
                continue;
            }
            let mut next = path.clone();
            next.push(tip + *e);
            let p = prob * w[k];
            if inner.contains(tip + *e) {
                stack.push((next, p));
            } else {
                *out.entry(SelfAvoidingPath::from_trusted(next)).or_insert(0.0) += p;
            }
        }
    }
    Ok(PathDistribution { probabilities: out })
}

fn enumerate_walks(j: usize, mut visit: impl FnMut(&[LatticePoint])) -> Result<()> {
    if j > 8 {
        return Err(Error::Refused(format!("walk enumeration is limited to j ≤ 8, got {j}")));
    }
    let mut walk = vec![LatticePoint::ORIGIN; j + 1];
    for code in 0..(1u32 << (2 * j)) {
        for k in 0..j {
            walk[k + 1] = walk[k] + UNIT_STEPS[((code >> (2 * k)) & 3) as usize];
        }
        visit(&walk);
    }
    Ok(())
}

fn counts_to_distribution(counts: BTreeMap<SelfAvoidingPath, u64>, j: usize) -> PathDistribution {
    // 4^j is a power of two, so these quotients are exact.
    let total = (1u64 << (2 * j)) as f64;
    PathDistribution { probabilities: counts.into_iter().map(|(k, c)| (k, c as f64 / total)).collect() }
}

/// Exact law of `L(S[0, j])` by enumerating all `4^j` walks. Limited to `j ≤ 8`.
pub fn fixed_time_lerw_distribution(j: usize) -> Result<PathDistribution> {
    let mut counts = BTreeMap::new();
    let mut erased = Vec::new();
    enumerate_walks(j, |w| {
        erase_into(w, &mut erased);
        *counts.entry(SelfAvoidingPath::from_trusted(erased.clone())).or_insert(0u64) += 1;
    })?;
    Ok(counts_to_distribution(counts, j))
}

/// Exact law of `L(S[0, j])` computed the other way round: erase the reversed
/// walk, then reverse the result back so it again runs from `S(0)` to `S(j)`.
pub fn fixed_time_reversed_lerw_distribution(j: usize) -> Result<PathDistribution> {
    let mut counts = BTreeMap::new();
    let mut reversed = Vec::new();
    let mut erased = Vec::new();
    enumerate_walks(j, |w| {
        reversed.clear();
        reversed.extend(w.iter().rev());
        erase_into(&reversed, &mut erased);
        erased.reverse();
        *counts.entry(SelfAvoidingPath::from_trusted(erased.clone())).or_insert(0u64) += 1;
    })?;
    Ok(counts_to_distribution(counts, j))
}

/// Walks are nearest-neighbor by construction; exposed for tests that want a
/// validated path.
pub fn enumerated_walks(j: usize) -> Result<Vec<LatticePath>> {
    let mut out = Vec::new();
    enumerate_walks(j, |w| out.push(LatticePath::from_trusted(w.to_vec())))?;
    Ok(out)
}
