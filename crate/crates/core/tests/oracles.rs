//! The library against independent reference computations.

mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{absorption_oracle, escape_oracle, literal_loop_erase, pt, random_obstacle, random_walk, seeded};
use lerwlab::harmonic::{dirichlet_solve, dirichlet_solve_with, escape_probability, ObstacleSet, SolverKind};
use lerwlab::looperase::{exact_lerw_distribution, laplacian_step_distribution};
use lerwlab::{loop_erase, sample_lerw, LatticePath, LerwSampleConfig, RandomStream, SelfAvoidingPath};

#[test]
fn loop_erasure_matches_literal_recursion() {
    let mut rng = seeded(1);
    for len in (0..400).map(|k| k % 300) {
        let walk = random_walk(&mut rng, len);
        let ours = loop_erase(&LatticePath::new(walk.clone()).unwrap());
        assert_eq!(ours.points(), literal_loop_erase(&walk).as_slice(), "walk {walk:?}");
    }
}

#[test]
fn dirichlet_field_matches_absorption_chain() {
    let mut rng = seeded(2);
    for k in 0..30 {
        let n = (2 + k % 6) as f64;
        let obstacle = random_obstacle(&mut rng, n, 0.15);
        let oracle = absorption_oracle(n, &obstacle);
        let set = ObstacleSet::new(obstacle.iter().copied());
        for kind in [SolverKind::Iterative, SolverKind::Dense] {
            let field = dirichlet_solve_with(n, &set, kind).unwrap();
            for (p, h) in &oracle {
                assert!((field.get(*p).unwrap() - h).abs() < 1e-9, "n={n} p={p} {kind:?}");
            }
        }
    }
}

#[test]
fn escape_matches_absorption_chain() {
    let mut rng = seeded(3);
    for k in 0..40 {
        let n = (1 + k % 8) as f64;
        let obstacle = random_obstacle(&mut rng, n, 0.2);
        let want = escape_oracle(n, &obstacle);
        let got = escape_probability(&ObstacleSet::new(obstacle.iter().copied()), n).unwrap();
        assert!((got - want).abs() < 1e-9, "n={n}: {got} vs {want}");
    }
}

#[test]
fn escape_of_single_neighbor_at_radius_one() {
    let a = ObstacleSet::new([pt(1, 0)]);
    assert_eq!(escape_probability(&a, 1.0).unwrap(), 0.75);
    assert_eq!(escape_oracle(1.0, &BTreeSet::from([pt(1, 0)])), 0.75);
}

#[test]
fn field_is_discrete_harmonic() {
    let obstacle = ObstacleSet::new((0..6).map(|x| pt(x, 0)));
    let field = dirichlet_solve(12.0, &obstacle).unwrap();
    for p in field.free_points() {
        assert!(field.mean_value_defect(p).unwrap() < 1e-9, "{p}");
    }
}

/// Laplacian-walk law of a two-step path, built by hand from the absorption oracle.
#[test]
fn laplacian_step_matches_oracle_weights() {
    let path = SelfAvoidingPath::new(vec![pt(0, 0), pt(1, 0), pt(1, 1)]).unwrap();
    let obstacle: BTreeSet<_> = path.points().iter().copied().collect();
    let h = absorption_oracle(3.0, &obstacle);
    let tip = pt(1, 1);
    let w: Vec<f64> = [pt(2, 1), pt(0, 1), pt(1, 2), pt(1, 0)]
        .iter()
        .map(|q| if obstacle.contains(q) { 0.0 } else { h.get(q).copied().unwrap_or(1.0) })
        .collect();
    let total: f64 = w.iter().sum();
    let got = laplacian_step_distribution(&path, 3.0).unwrap();
    assert_eq!(tip, path.tip());
    for k in 0..4 {
        assert!((got[k] - w[k] / total).abs() < 1e-10);
    }
}

#[test]
fn exact_distribution_is_normalized_and_matches_samples() {
    let cfg = LerwSampleConfig::new(1.5, 3.0).unwrap();
    let exact = exact_lerw_distribution(&cfg).unwrap();
    assert!((exact.total() - 1.0).abs() < 1e-12);
    let stream = RandomStream::new(9, 0);
    let mut counts = BTreeMap::new();
    for i in 0..40_000u64 {
        *counts.entry(sample_lerw(&cfg, stream.derive(i)).unwrap()).or_insert(0u64) += 1;
    }
    assert!(exact.total_variation_to_counts(&counts) < 0.02);
}
