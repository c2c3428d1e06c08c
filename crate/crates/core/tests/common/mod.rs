//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the solver or the loop-erasure code under test.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lerwlab::LatticePoint;
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn pt(x: i32, y: i32) -> LatticePoint {
    LatticePoint::new(x, y)
}

fn inside(p: LatticePoint, n: f64) -> bool {
    ((p.x as f64).powi(2) + (p.y as f64).powi(2)) < n * n
}

/// Absorption probabilities of simple random walk in `C_n` killed on
/// `obstacle` (value 0) and on leaving the ball (value 1), by a dense linear
/// solve of `(I − P) h = b` over the free interior points.
pub fn absorption_oracle(n: f64, obstacle: &BTreeSet<LatticePoint>) -> BTreeMap<LatticePoint, f64> {
    let r = n.ceil() as i32;
    let free: Vec<LatticePoint> = (-r..=r)
        .flat_map(|x| (-r..=r).map(move |y| pt(x, y)))
        .filter(|&p| inside(p, n) && !obstacle.contains(&p))
        .collect();
    let index: BTreeMap<LatticePoint, usize> = free.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let m = free.len();
    if m == 0 {
        return BTreeMap::new();
    }
    let mut a = DMatrix::<f64>::identity(m, m);
    let mut b = DVector::<f64>::zeros(m);
    for (i, &p) in free.iter().enumerate() {
        for q in [pt(p.x + 1, p.y), pt(p.x - 1, p.y), pt(p.x, p.y + 1), pt(p.x, p.y - 1)] {
            if let Some(&j) = index.get(&q) {
                a[(i, j)] -= 0.25;
            } else if !obstacle.contains(&q) {
                // q is outside the ball: the walk has escaped.
                b[i] += 0.25;
            }
        }
    }
    let h = a.lu().solve(&b).expect("absorbing chain is non-singular");
    index.into_iter().map(|(p, i)| (p, h[i])).collect()
}

/// `Es_n(A)` from the absorption oracle: one step from the origin, then the
/// absorption probability from the neighbor.
pub fn escape_oracle(n: f64, obstacle: &BTreeSet<LatticePoint>) -> f64 {
    let h = absorption_oracle(n, obstacle);
    [pt(1, 0), pt(-1, 0), pt(0, 1), pt(0, -1)]
        .iter()
        .map(|q| {
            if obstacle.contains(q) {
                0.0
            } else {
                h.get(q).copied().unwrap_or(1.0)
            }
        })
        .sum::<f64>()
        / 4.0
}

/// Chronological loop-erasure written directly from the index recursion
/// `s_0 = max{j : S_j = S_0}`, `s_i = max{j : S_j = S_{s_{i−1}+1}}`.
pub fn literal_loop_erase(walk: &[LatticePoint]) -> Vec<LatticePoint> {
    let last = walk.len() - 1;
    let last_visit = |p: LatticePoint| (0..=last).rev().find(|&j| walk[j] == p).unwrap();
    let mut s = last_visit(walk[0]);
    let mut out = vec![walk[s]];
    while s != last {
        s = last_visit(walk[s + 1]);
        out.push(walk[s]);
    }
    out
}

/// Nearest-neighbor walk from the origin with `steps` uniformly random steps.
pub fn random_walk(rng: &mut ChaCha8Rng, steps: usize) -> Vec<LatticePoint> {
    let mut p = pt(0, 0);
    let mut out = vec![p];
    for _ in 0..steps {
        p = match rng.random_range(0..4) {
            0 => pt(p.x + 1, p.y),
            1 => pt(p.x - 1, p.y),
            2 => pt(p.x, p.y + 1),
            _ => pt(p.x, p.y - 1),
        };
        out.push(p);
    }
    out
}

/// A random subset of `C_n` with roughly `density` of its points.
pub fn random_obstacle(rng: &mut ChaCha8Rng, n: f64, density: f64) -> BTreeSet<LatticePoint> {
    let r = n.ceil() as i32;
    (-r..=r)
        .flat_map(|x| (-r..=r).map(move |y| pt(x, y)))
        .filter(|&p| inside(p, n))
        .filter(|_| rng.random_bool(density))
        .collect()
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
