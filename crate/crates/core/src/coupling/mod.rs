//! Skorohod-embedding coupling of planar simple random walk and Brownian
//! motion.
//!
//! `B` has variance parameter 1/2: `B_t = B̃_{t/2}` with `B̃` standard. The
//! embedding runs on the clock `u = t/2` of `B̃`, in which the unit crossing
//! times `η_k^i` of each component have mean 1. An independent ±1 walk `W`
//! decides which component moves: `R_k = (W_k + k)/2` steps go to the first
//! coordinate and `k − R_k` to the second, so
//! `S_k = (S¹(R_k), S²(k − R_k))` is a simple random walk on Z². The
//! deviation `sup_{u ≤ N/2} |B̃_u − S(⌊2u⌋)|` equals
//! `sup_{t ≤ N} |B_t − S(⌊t⌋)|`.

mod bridge;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Error, Result};
use crate::harness::{loglog_fit, FitResult};
use crate::lattice::{LatticePath, LatticePoint};
use crate::stats::median;
use crate::walk::RandomStream;
use bridge::{CrossingGenerator, Event};

/// Largest grid spacing accepted by [`sample_bm`].
pub const MAX_DT: f64 = 1e-2;
/// Largest number of grid steps materialized by [`sample_bm`].
pub const STEP_BUDGET: f64 = 1e8;

/// A planar Brownian motion with variance parameter 1/2 on the grid
/// `t_j = j·dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct BrownianPath {
    pub dt: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl BrownianPath {
    pub fn duration(&self) -> f64 {
        (self.x.len() - 1) as f64 * self.dt
    }

    pub fn component(&self, i: usize) -> &[f64] {
        if i == 0 {
            &self.x
        } else {
            &self.y
        }
    }
}

/// Gaussian-increment discretization: increments of variance `dt/2` per
/// component. Component `i` draws from `stream.derive(i)`.
pub fn sample_bm(duration: f64, dt: f64, stream: RandomStream) -> Result<BrownianPath> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(validation(format!("dt must lie in (0, {MAX_DT}], got {dt}")));
    }
    if !(duration >= 0.0 && duration.is_finite()) {
        return Err(validation(format!("duration must be finite and non-negative, got {duration}")));
    }
    let steps = (duration / dt).round();
    if steps > STEP_BUDGET {
        return Err(Error::Refused(format!("{steps} steps exceed the budget of {STEP_BUDGET}")));
    }
    let sd = (0.5 * dt).sqrt();
    let component = |tag: u64| {
        let mut rng = stream.derive(tag).rng();
        let mut v = Vec::with_capacity(steps as usize + 1);
        let mut acc = 0.0;
        v.push(acc);
        for _ in 0..steps as usize {
            acc += sd * rng.sample::<f64, _>(StandardNormal);
            v.push(acc);
        }
        v
    };
    Ok(BrownianPath { dt, x: component(0), y: component(1) })
}

/// Output of the embedding of `N` walk steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    /// Crossing times `η_1^i < η_2^i < …` on the clock `u = t/2`.
    pub eta_times: [Vec<f64>; 2],
    /// `B^i(η_k^i)`; consecutive values differ by 1 plus the grid overshoot.
    pub crossing_values: [Vec<f64>; 2],
    /// `W_0, …, W_N`.
    pub aux_walk: Vec<i64>,
    /// `R_0, …, R_N`.
    pub interleaver: Vec<u64>,
    /// `S_0, …, S_N`.
    pub walk: LatticePath,
    /// `max_{t_j ≤ N} |B(t_j) − S(⌊t_j⌋)|` over the grid.
    pub deviation: f64,
}

/// ±1 auxiliary walk steps drawn from `stream`.
fn aux_steps(n: usize, stream: RandomStream) -> Vec<i8> {
    let mut rng = stream.rng();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let bits: u64 = rng.random();
        for b in 0..64 {
            if out.len() == n {
                break;
            }
            out.push(if bits >> b & 1 == 1 { 1 } else { -1 });
        }
    }
    out
}

/// Assembles `S` from the auxiliary walk and per-component crossing signs.
fn interleave(w_steps: &[i8], signs: [&[i8]; 2]) -> (Vec<i64>, Vec<u64>, Vec<LatticePoint>) {
    let n = w_steps.len();
    let mut w = Vec::with_capacity(n + 1);
    let mut r = Vec::with_capacity(n + 1);
    let mut s = Vec::with_capacity(n + 1);
    let (mut wk, mut rk, mut used2) = (0i64, 0u64, 0usize);
    let mut cur = LatticePoint::ORIGIN;
    w.push(0);
    r.push(0);
    s.push(cur);
    for &step in w_steps {
        wk += step as i64;
        if step == 1 {
            cur.x += signs[0][rk as usize] as i32;
            rk += 1;
        } else {
            cur.y += signs[1][used2] as i32;
            used2 += 1;
        }
        w.push(wk);
        r.push(rk);
        s.push(cur);
    }
    (w, r, s)
}

fn counts_needed(w_steps: &[i8]) -> [usize; 2] {
    let ups = w_steps.iter().filter(|&&s| s == 1).count();
    [ups, w_steps.len() - ups]
}

/// Embeds `n` steps of a simple random walk in `bm`; the auxiliary walk draws
/// from `stream`.
pub fn skorohod_embed(bm: &BrownianPath, n: usize, stream: RandomStream) -> Result<EmbeddingRecord> {
    let w_steps = aux_steps(n, stream);
    let needed = counts_needed(&w_steps);
    let du = bm.dt / 2.0;
    let mut eta_times = [Vec::new(), Vec::new()];
    let mut crossing_values = [Vec::new(), Vec::new()];
    let mut signs: [Vec<i8>; 2] = [Vec::new(), Vec::new()];
    for i in 0..2 {
        let b = bm.component(i);
        let mut reference = 0.0;
        for (j, &v) in b.iter().enumerate().skip(1) {
            if eta_times[i].len() == needed[i] {
                break;
            }
            let d = v - reference;
            if d.abs() >= 1.0 {
                eta_times[i].push(j as f64 * du);
                crossing_values[i].push(v);
                signs[i].push(if d > 0.0 { 1 } else { -1 });
                reference = v;
            }
        }
        if eta_times[i].len() < needed[i] {
            let have = eta_times[i].len();
            let per = if have > 0 { eta_times[i][have - 1] / have as f64 } else { 1.0 };
            let required = 2.0 * per.max(1.0) * needed[i] as f64 * 1.2;
            return Err(Error::Refused(format!(
                "component {} crossed {have} of {} times; a duration of about {required:.0} is required",
                i + 1,
                needed[i]
            )));
        }
    }
    if bm.duration() < n as f64 {
        return Err(Error::Refused(format!("deviation up to step {n} needs duration {n}, have {}", bm.duration())));
    }
    let (aux_walk, interleaver, points) = interleave(&w_steps, [&signs[0], &signs[1]]);
    let mut deviation = 0.0f64;
    for j in 0..bm.x.len() {
        let t = j as f64 * bm.dt;
        if t > n as f64 + 1e-9 {
            break;
        }
        let k = ((t + 1e-9).floor() as usize).min(n);
        let s = points[k];
        deviation = deviation.max((bm.x[j] - s.x as f64).hypot(bm.y[j] - s.y as f64));
    }
    Ok(EmbeddingRecord {
        eta_times,
        crossing_values,
        aux_walk,
        interleaver,
        walk: LatticePath::from_trusted(points),
        deviation,
    })
}

/// `count` successive crossing-time increments `η_k − η_{k−1}` of one
/// component on the clock `u`, observed on a grid of `t`-spacing `dt`.
pub fn crossing_increments(dt: f64, count: usize, stream: RandomStream) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(validation(format!("dt must lie in (0, {MAX_DT}], got {dt}")));
    }
    let mut g = CrossingGenerator::new(dt / 2.0, stream.rng());
    let mut out = Vec::with_capacity(count);
    let mut last = 0.0;
    while out.len() < count {
        if let Event::Crossing { time, .. } = g.next_event() {
            out.push(time - last);
            last = time;
        }
    }
    Ok(out)
}

/// Deviations `sup_{u ≤ N/2} |B̃_u − S(⌊2u⌋)|` of one coupled path for each
/// horizon `N` (sorted ascending), observed on the root grid of the bridge
/// generator. Nested horizons share the path prefix, so the values are
/// non-decreasing.
pub fn deviation_profile(horizons: &[usize], dt: f64, stream: RandomStream) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(validation(format!("dt must lie in (0, {MAX_DT}], got {dt}")));
    }
    if horizons.is_empty() || horizons.windows(2).any(|w| w[0] >= w[1]) || horizons[0] == 0 {
        return Err(validation("horizons must be positive and strictly increasing"));
    }
    let n_max = *horizons.last().unwrap();
    let w_steps = aux_steps(n_max, stream.derive(0));
    let needed = counts_needed(&w_steps);
    let u_end = n_max as f64 / 2.0;
    let mut roots: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut signs: [Vec<i8>; 2] = [Vec::new(), Vec::new()];
    let mut spacing = 0.0;
    for i in 0..2 {
        let mut g = CrossingGenerator::new(dt / 2.0, stream.derive(i as u64 + 1).rng());
        spacing = g.root_spacing();
        let root_count = (u_end / spacing + 1e-9).floor() as u64 + 1;
        while roots[i].len() < root_count as usize || signs[i].len() < needed[i] {
            match g.next_event() {
                Event::Root { value, .. } => {
                    if roots[i].len() < root_count as usize {
                        roots[i].push(value);
                    }
                }
                Event::Crossing { sign, .. } => {
                    if signs[i].len() < needed[i] {
                        signs[i].push(sign);
                    }
                }
            }
        }
    }
    let (_, _, points) = interleave(&w_steps, [&signs[0], &signs[1]]);
    let mut out = Vec::with_capacity(horizons.len());
    let mut running = 0.0f64;
    let mut next = 0;
    for (m, (&bx, &by)) in roots[0].iter().zip(&roots[1]).enumerate() {
        let u = m as f64 * spacing;
        while next < horizons.len() && u > horizons[next] as f64 / 2.0 + 1e-9 {
            out.push(running);
            next += 1;
        }
        let k = ((2.0 * u + 1e-9).floor() as usize).min(n_max);
        let s = points[k];
        running = running.max((bx - s.x as f64).hypot(by - s.y as f64));
    }
    while out.len() < horizons.len() {
        out.push(running);
    }
    Ok(out)
}

/// Median deviation per horizon over `replications` independent coupled
/// paths (replication `r` uses `stream.derive(r)`) and the log-log fit of
/// median deviation against horizon.
pub fn deviation_scaling(horizons: &[usize], replications: usize, dt: f64, stream: RandomStream) -> Result<FitResult> {
    if horizons.len() < 2 {
        return Err(validation("deviation scaling needs at least two horizons"));
    }
    if replications == 0 {
        return Err(validation("replications must be positive"));
    }
    let profiles: Vec<Vec<f64>> = (0..replications as u64)
        .into_par_iter()
        .map(|r| deviation_profile(horizons, dt, stream.derive(r)))
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> = horizons
        .iter()
        .enumerate()
        .map(|(h, &n)| (n as f64, median(&profiles.iter().map(|p| p[h]).collect::<Vec<_>>())))
        .collect();
    loglog_fit(&points)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_duration_is_a_point() {
        let bm = sample_bm(0.0, 1e-3, RandomStream::new(1, 1)).unwrap();
        assert_eq!((bm.x.as_slice(), bm.y.as_slice()), ([0.0].as_slice(), [0.0].as_slice()));
    }

    #[test]
    fn refusals() {
        assert!(sample_bm(1.0, 0.1, RandomStream::new(1, 1)).is_err());
        assert!(matches!(sample_bm(1e7, 1e-2, RandomStream::new(1, 1)), Err(Error::Refused(_))));
        let bm = sample_bm(2.0, 1e-3, RandomStream::new(1, 1)).unwrap();
        assert!(matches!(skorohod_embed(&bm, 50, RandomStream::new(1, 2)), Err(Error::Refused(_))));
    }

    #[test]
    fn embedding_invariants() {
        let bm = sample_bm(80.0, 1e-3, RandomStream::new(2, 1)).unwrap();
        let rec = skorohod_embed(&bm, 40, RandomStream::new(2, 2)).unwrap();
        assert_eq!(rec.walk.len(), 41);
        for k in 0..=40 {
            assert_eq!(2 * rec.interleaver[k] as i64, rec.aux_walk[k] + k as i64);
        }
        for w in rec.walk.points().windows(2) {
            assert!(w[0].is_adjacent(w[1]));
        }
        for i in 0..2 {
            assert!(rec.eta_times[i].windows(2).all(|w| w[0] < w[1]));
            let mut prev = 0.0;
            for &v in &rec.crossing_values[i] {
                assert!(((v - prev).abs() - 1.0).abs() < 0.2);
                prev = v;
            }
        }
        assert!(rec.deviation >= 0.0);
    }

    #[test]
    fn profile_is_monotone() {
        let d = deviation_profile(&[16, 64, 256], 1e-4, RandomStream::new(3, 3)).unwrap();
        assert!(d[0] >= 0.0 && d.windows(2).all(|w| w[0] <= w[1]));
    }
}
