//! Invariants over randomly generated inputs.

mod common;

use std::collections::BTreeSet;

use common::{literal_loop_erase, pt};
use lerwlab::crookedness::{crookedness_counts, scale_crossings};
use lerwlab::extremal::segments_intersect;
use lerwlab::harmonic::{dirichlet_solve, escape_probability, ObstacleSet};
use lerwlab::harness::loglog_fit;
use lerwlab::{loop_erase, sample_lerw, LatticePath, LatticePoint, LerwSampleConfig, RandomStream};
use proptest::prelude::*;

fn walk_strategy(max_len: usize) -> impl Strategy<Value = Vec<LatticePoint>> {
    prop::collection::vec(0u8..4, 0..max_len).prop_map(|dirs| {
        let mut p = pt(0, 0);
        let mut out = vec![p];
        for d in dirs {
            p = match d {
                0 => pt(p.x + 1, p.y),
                1 => pt(p.x - 1, p.y),
                2 => pt(p.x, p.y + 1),
                _ => pt(p.x, p.y - 1),
            };
            out.push(p);
        }
        out
    })
}

fn obstacle_strategy(r: i32) -> impl Strategy<Value = BTreeSet<LatticePoint>> {
    prop::collection::btree_set((-r..=r, -r..=r).prop_map(|(x, y)| pt(x, y)), 0..12)
}

fn is_subsequence(sub: &[LatticePoint], of: &[LatticePoint]) -> bool {
    let mut it = of.iter();
    sub.iter().all(|p| it.any(|q| q == p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn loop_erasure_invariants(walk in walk_strategy(200)) {
        let erased = loop_erase(&LatticePath::new(walk.clone()).unwrap());
        let pts = erased.points();
        let distinct: BTreeSet<_> = pts.iter().collect();
        prop_assert_eq!(distinct.len(), pts.len());
        prop_assert_eq!(pts[0], walk[0]);
        prop_assert_eq!(*pts.last().unwrap(), *walk.last().unwrap());
        prop_assert!(pts.windows(2).all(|w| w[0].is_adjacent(w[1])));
        prop_assert!(is_subsequence(pts, &walk));
        let again = loop_erase(&LatticePath::new(pts.to_vec()).unwrap());
        prop_assert_eq!(again.points(), pts);
        let literal = literal_loop_erase(&walk);
        prop_assert_eq!(pts, literal.as_slice());
    }

    #[test]
    fn escape_is_monotone_in_the_obstacle(a in obstacle_strategy(5), extra in obstacle_strategy(5), n in 2u32..7) {
        let n = n as f64;
        let b: BTreeSet<_> = a.union(&extra).copied().collect();
        let ea = escape_probability(&ObstacleSet::new(a.iter().copied()), n).unwrap();
        let eb = escape_probability(&ObstacleSet::new(b.iter().copied()), n).unwrap();
        prop_assert!(eb <= ea + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ea));
    }

    #[test]
    fn dropping_the_origin_costs_at_most_a_factor_four(a in obstacle_strategy(4), n in 2u32..7) {
        let n = n as f64;
        let mut with_origin = a.clone();
        with_origin.insert(pt(0, 0));
        let full = escape_probability(&ObstacleSet::new(with_origin.iter().copied()), n).unwrap();
        let dropped = escape_probability(&ObstacleSet::new(a.iter().copied().filter(|p| !p.is_origin())), n).unwrap();
        prop_assert!(dropped <= 4.0 * full + 1e-12);
    }

    // Bounds allow for the iterative solver's stopping tolerance.
    #[test]
    fn harmonic_field_is_bounded_and_harmonic(a in obstacle_strategy(6), n in 3u32..9) {
        let field = dirichlet_solve(n as f64, &ObstacleSet::new(a)).unwrap();
        for p in field.free_points() {
            let v = field.get(p).unwrap();
            prop_assert!((-1e-9..=1.0 + 1e-9).contains(&v), "h({}) = {:e}", p, v - 1.0);
            prop_assert!(field.mean_value_defect(p).unwrap() < 1e-8);
        }
    }

    #[test]
    fn sampler_is_deterministic_and_lands_in_lambda(seed in any::<u64>(), n in 2u32..12) {
        let cfg = LerwSampleConfig::doubled(n as f64).unwrap();
        let s = RandomStream::new(seed, 0);
        let a = sample_lerw(&cfg, s).unwrap();
        let b = sample_lerw(&cfg, s).unwrap();
        prop_assert_eq!(&a, &b);
        let nf = n as f64;
        let (last, body) = a.points().split_last().unwrap();
        prop_assert!(body.iter().all(|p| p.norm() < nf));
        prop_assert!(last.norm() >= nf);
    }

    #[test]
    fn crookedness_counts_cover_every_scale(seed in any::<u64>(), m in 1u32..4, delta in 0.01f64..1.5) {
        let cfg = LerwSampleConfig::doubled(m as f64 * 1.0f64.exp().powi(m as i32)).unwrap();
        let path = sample_lerw(&cfg, RandomStream::new(seed, 1)).unwrap();
        let stats = scale_crossings(&path, m).unwrap();
        let c = crookedness_counts(&stats, delta).unwrap();
        prop_assert_eq!(c.scales, m);
        prop_assert!(c.straight_count + c.crooked_count >= m);
        prop_assert!(c.straight_count <= m && c.crooked_count <= m);
    }

    #[test]
    fn segment_intersection_is_symmetric(c in prop::array::uniform8(-3i8..4)) {
        let f = |k: usize| [c[k] as f64, c[k + 1] as f64];
        let (p1, p2, q1, q2) = (f(0), f(2), f(4), f(6));
        prop_assert_eq!(segments_intersect(p1, p2, q1, q2), segments_intersect(q1, q2, p1, p2));
        prop_assert_eq!(segments_intersect(p1, p2, q1, q2), segments_intersect(p2, p1, q1, q2));
    }

    #[test]
    fn loglog_fit_recovers_exact_power_laws(slope in -3.0f64..3.0, scale in 0.1f64..10.0) {
        let pts: Vec<_> = [2.0f64, 4.0, 8.0, 16.0].iter().map(|&x| (x, scale * x.powf(slope))).collect();
        let fit = loglog_fit(&pts).unwrap();
        prop_assert!((fit.slope - slope).abs() < 1e-9);
        prop_assert!((fit.intercept - scale.ln()).abs() < 1e-9);
    }
}
