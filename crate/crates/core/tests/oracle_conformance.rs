//! Exhaustive small-instance conformance: the transformational
//! essential-graph labeling against the enumeration oracle, covered
//! reversals against the equivalence test, the RCAR support against the
//! full class, and the inclusion-boundary property.

mod common;

use std::collections::{HashMap, HashSet};

use bnsearch::{
    dag_to_cpdag, enumerate_class, independence_model, random_dag, rcar, Arc, Dag, RcarConfig,
};
use common::{all_dags, cpdag_by_enumeration};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn cpdag_conversion_matches_enumeration_oracle_exhaustively() {
    for n in 2..=4 {
        for g in all_dags(n) {
            assert_eq!(
                dag_to_cpdag(&g),
                cpdag_by_enumeration(&g),
                "mismatch for arcs {:?}",
                g.arcs()
            );
        }
    }
}

#[test]
fn cpdag_conversion_matches_oracle_on_random_larger_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..300 {
        let g = random_dag(6, 0.35, &mut rng);
        assert_eq!(dag_to_cpdag(&g), cpdag_by_enumeration(&g));
    }
}

#[test]
fn covered_reversal_preserves_equivalence_up_to_n5() {
    for n in 2..=5 {
        for g in all_dags(n) {
            for a in g.covered_arcs() {
                let mut h = g.clone();
                h.reverse_arc(a).expect("covered reversal never cycles");
                assert!(g.equivalent(&h).unwrap(), "arcs {:?}, reversal {a}", g.arcs());
            }
        }
    }
}

#[test]
fn rcar_support_covers_the_whole_class_at_n4() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    // One representative per class, classes of size <= 6.
    let mut seen_classes: HashSet<bnsearch::Cpdag> = HashSet::new();
    for g in all_dags(4) {
        if !seen_classes.insert(dag_to_cpdag(&g)) {
            continue;
        }
        let class: HashSet<Vec<Arc>> =
            enumerate_class(&g).unwrap().into_iter().map(|d| d.arcs()).collect();
        if class.len() > 6 {
            continue;
        }
        let mut support = HashSet::new();
        for _ in 0..10_000 {
            support.insert(rcar(&g, RcarConfig { tau: 10 }, &mut rng).arcs());
            if support.len() == class.len() {
                break;
            }
        }
        assert_eq!(support, class, "from {:?}", g.arcs());
    }
}

/// Compact bitset form of an n=4 elementary-triplet model: 6 pairs times
/// 4 conditioning sets.
fn model_bits(g: &Dag) -> u32 {
    let mut bits = 0u32;
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let model = independence_model(g).unwrap();
    for t in &model.triplets {
        let pair_idx = pairs.iter().position(|&p| p == (t.u, t.v)).unwrap();
        let rest: Vec<usize> = (0..4).filter(|x| *x != t.u && *x != t.v).collect();
        let mut s_idx = 0;
        for (i, r) in rest.iter().enumerate() {
            if t.s.contains(r) {
                s_idx |= 1 << i;
            }
        }
        bits |= 1 << (pair_idx * 4 + s_idx);
    }
    bits
}

#[test]
fn single_arc_removals_land_on_the_inclusion_boundary() {
    // For every G and every H = (member of G's class) minus one arc, no
    // model sits strictly between I(G) and I(H).
    let dags = all_dags(4);
    let mut models: HashMap<Vec<Arc>, u32> = HashMap::new();
    for g in &dags {
        models.insert(g.arcs(), model_bits(g));
    }
    let strict_subset = |a: u32, b: u32| a != b && a & b == a;

    for g in &dags {
        let m_g = models[&g.arcs()];
        for member in enumerate_class(g).unwrap() {
            for a in member.arcs() {
                let mut h = member.clone();
                h.remove_arc(a).unwrap();
                let m_h = models[&h.arcs()];
                assert!(strict_subset(m_g, m_h));
                for k in &dags {
                    let m_k = models[&k.arcs()];
                    assert!(
                        !(strict_subset(m_g, m_k) && strict_subset(m_k, m_h)),
                        "model strictly between: G={:?} K={:?} H={:?}",
                        g.arcs(),
                        k.arcs(),
                        h.arcs()
                    );
                }
            }
        }
    }
}
