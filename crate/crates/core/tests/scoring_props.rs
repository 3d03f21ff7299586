//! Scoring invariants that need sampled data: delta consistency against
//! full rescores and score gain on genuinely dependent data.

use bnsearch::{
    apply_move, forward_sample, neighbourhood, random_dag, BayesNet, BdeuScorer, Dag, Dataset,
    NeighbourhoodKind,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_dataset(n_vars: usize, rows: usize, rng: &mut impl Rng) -> Dataset {
    let labels = (0..n_vars).map(|i| format!("v{i}")).collect();
    let arities: Vec<usize> = (0..n_vars).map(|_| rng.gen_range(2..=3)).collect();
    let data = (0..rows)
        .map(|_| arities.iter().map(|&k| rng.gen_range(0..k)).collect())
        .collect();
    Dataset::from_integer_rows(labels, arities, data).unwrap()
}

#[test]
fn delta_equals_full_rescore_on_random_moves() {
    let mut rng = ChaCha8Rng::seed_from_u64(100);
    let data = random_dataset(6, 300, &mut rng);
    let scorer = BdeuScorer::new(&data, 1.0);
    let mut checked = 0;
    while checked < 10_000 {
        let g = random_dag(6, 0.4, &mut rng);
        let (base, moves) = neighbourhood(&g, NeighbourhoodKind::Ar, &mut rng);
        let base = base.into_owned();
        let score_base = scorer.score(&base).unwrap();
        for &m in moves.iter() {
            let delta = scorer.delta(&base, m).unwrap();
            let full = scorer.score(&apply_move(&base, m).unwrap()).unwrap() - score_base;
            assert!(
                (delta - full).abs() < 1e-10,
                "move {m:?} on {:?}: {delta} vs {full}",
                base.arcs()
            );
            checked += 1;
        }
    }
}

#[test]
fn strong_chain_beats_the_empty_graph() {
    let net = BayesNet::parse(
        "node a\nstates 0 1\nparents\ncpt\n0.5 0.5\nend\n\
         node b\nstates 0 1\nparents a\ncpt\n0.9 0.1\n0.1 0.9\nend\n\
         node c\nstates 0 1\nparents b\ncpt\n0.85 0.15\n0.15 0.85\nend\n",
    )
    .unwrap();
    let data = forward_sample(&net, 5000, &mut ChaCha8Rng::seed_from_u64(5));
    let scorer = BdeuScorer::new(&data, 1.0);
    let chain = net.structure().clone();
    assert!(scorer.score(&chain).unwrap() > scorer.score(&Dag::empty(3)).unwrap());
}

#[test]
fn scores_survive_shared_cache_reuse_across_structures() {
    let mut rng = ChaCha8Rng::seed_from_u64(200);
    let data = random_dataset(5, 200, &mut rng);
    let scorer = BdeuScorer::new(&data, 1.0);
    for _ in 0..50 {
        let g = random_dag(5, 0.5, &mut rng);
        let through_cache = scorer.score(&g).unwrap();
        let direct = scorer.score_uncached(&g).unwrap();
        assert_eq!(through_cache.to_bits(), direct.to_bits());
    }
}
