//! MC3: Metropolis sampling over DAG space with local-move proposals,
//! plus the convergence diagnostics (edge trace, essential-graph
//! mobility, class-size bounds, and the marginal-data estimate).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::cpdag::{dag_to_cpdag, Cpdag};
use crate::dag::{Arc, Dag};
use crate::equivalence::class_size_lower_bound;
use crate::neighbourhood::{
    apply_move, neighbourhood_size, random_move, NeighbourhoodKind,
};
use crate::scoring::{BdeuScorer, ScoreError};

#[derive(Debug, Error)]
pub enum McmcError {
    #[error("invalid chain configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

#[derive(Debug, Clone)]
pub struct ChainConfig {
    pub kind: NeighbourhoodKind,
    pub iterations: usize,
    pub seed: u64,
    /// Starting structure; the empty graph when absent.
    pub start: Option<Dag>,
    /// Multiply the acceptance ratio by |N(G)| / |N(G')|. Only available
    /// for the deterministic kinds, whose proposal is exactly uniform over
    /// a computable set; the paper-faithful chain leaves this off.
    pub hastings_correction: bool,
    /// For the RCAR kinds: on reject, keep the RCAR-walked base instead of
    /// the pre-walk state. Off by default, making reject a true no-op.
    pub rebase_on_reject: bool,
    /// DAGs averaged in the marginal-data estimate.
    pub top_k: usize,
    /// Diagnostics record stride.
    pub thin: usize,
}

impl ChainConfig {
    pub fn new(kind: NeighbourhoodKind, iterations: usize) -> Self {
        ChainConfig {
            kind,
            iterations,
            seed: 0,
            start: None,
            hastings_correction: false,
            rebase_on_reject: false,
            top_k: 5,
            thin: 1,
        }
    }

    fn validate(&self, n_vars: usize) -> Result<(), McmcError> {
        if self.iterations == 0 {
            return Err(McmcError::Config("iterations must be >= 1".into()));
        }
        if self.thin == 0 || self.top_k == 0 {
            return Err(McmcError::Config("thin and top_k must be >= 1".into()));
        }
        if self.hastings_correction && self.kind.is_randomized() {
            return Err(McmcError::Config(
                "the Hastings correction needs a deterministic proposal kind".into(),
            ));
        }
        if let Some(start) = &self.start {
            if start.n() != n_vars {
                return Err(McmcError::Config(format!(
                    "start graph has {} nodes but the dataset has {n_vars} variables",
                    start.n()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ChainState {
    pub current: Dag,
    pub log_score: f64,
    pub iteration: usize,
    pub accepts: usize,
    pub rejects: usize,
}

impl ChainState {
    pub fn new(start: Dag, scorer: &BdeuScorer) -> Result<Self, McmcError> {
        let log_score = scorer.score(&start)?;
        Ok(ChainState { current: start, log_score, iteration: 0, accepts: 0, rejects: 0 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub iteration: usize,
    pub edges: usize,
    pub log_score: f64,
    pub accepted: bool,
    /// Index of the current state's essential graph, in first-visit order.
    pub cpdag_id: usize,
}

/// Visit tally of one DAG across the chain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisitTally {
    pub count: u64,
    /// log p(G, D) up to the constant dropped by the uniform prior.
    pub log_joint: f64,
}

/// One visited equivalence class, with the distinct member DAGs seen.
#[derive(Debug, Clone)]
pub struct ClassVisit {
    pub cpdag: Cpdag,
    pub first_iteration: usize,
    pub members: BTreeSet<Vec<Arc>>,
}

#[derive(Debug, Clone)]
pub struct ChainSummary {
    pub iterations: usize,
    pub accepts: usize,
    pub rejects: usize,
    /// accepts / rejects (Table-3 style); infinite when nothing was rejected.
    pub acc_rej_ratio: f64,
    pub iter_per_sec: f64,
    pub distinct_cpdags: usize,
    /// log of the marginal-data estimate over the `top_k` most-visited DAGs.
    pub log_phat_d: f64,
    /// Edge count -> number of recorded iterations at that count.
    pub edge_histogram: BTreeMap<usize, u64>,
    pub final_dag: Dag,
    pub final_score: f64,
    pub visits: HashMap<Vec<Arc>, VisitTally>,
    pub class_visits: Vec<ClassVisit>,
}

/// min{1, e^log_ratio} without overflowing for large positive ratios.
pub fn acceptance_probability(log_ratio: f64) -> f64 {
    if log_ratio >= 0.0 {
        1.0
    } else {
        log_ratio.exp()
    }
}

/// One Metropolis transition. Proposes a uniform move from the configured
/// neighbourhood of the current state and accepts with probability
/// min{1, exp(delta) * h}. Returns whether the proposal was accepted.
pub fn mc3_step(
    state: &mut ChainState,
    cfg: &ChainConfig,
    scorer: &BdeuScorer,
    rng: &mut impl Rng,
) -> Result<bool, McmcError> {
    state.iteration += 1;
    let Ok((base, mv)) = random_move(&state.current, cfg.kind, rng) else {
        // Single-node domain: no move exists, the chain stays put.
        state.rejects += 1;
        return Ok(false);
    };
    let delta = scorer.delta(base.as_ref(), mv)?;
    let candidate = apply_move(base.as_ref(), mv).map_err(ScoreError::from)?;
    let log_h = if cfg.hastings_correction {
        let from = neighbourhood_size(&state.current, cfg.kind)
            .expect("validated: deterministic kind") as f64;
        let to = neighbourhood_size(&candidate, cfg.kind)
            .expect("validated: deterministic kind") as f64;
        (from / to).ln()
    } else {
        0.0
    };
    let accept = rng.gen::<f64>() < acceptance_probability(delta + log_h);
    if accept {
        state.log_score = scorer.score(&candidate)?;
        state.current = candidate;
        state.accepts += 1;
    } else {
        state.rejects += 1;
        if cfg.rebase_on_reject && cfg.kind.is_randomized() {
            let base = base.into_owned();
            state.log_score = scorer.score(&base)?;
            state.current = base;
        }
    }
    Ok(accept)
}

/// Runs the chain and collects per-iteration diagnostics (every
/// `thin`-th iteration) plus the summary statistics.
pub fn run_chain(
    scorer: &BdeuScorer,
    cfg: &ChainConfig,
) -> Result<(Vec<DiagnosticsRecord>, ChainSummary), McmcError> {
    let n = scorer.data().n_vars();
    cfg.validate(n)?;
    let start = cfg.start.clone().unwrap_or_else(|| Dag::empty(n));
    let mut state = ChainState::new(start, scorer)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    struct DagInfo {
        tally: VisitTally,
        cpdag_id: usize,
    }
    let mut dags: HashMap<Vec<Arc>, DagInfo> = HashMap::new();
    let mut classes: Vec<ClassVisit> = Vec::new();
    let mut class_ids: HashMap<Cpdag, usize> = HashMap::new();

    let mut visit = |g: &Dag, score: f64, iteration: usize| -> usize {
        let key = g.arcs();
        if let Some(info) = dags.get_mut(&key) {
            info.tally.count += 1;
            return info.cpdag_id;
        }
        let cpdag = dag_to_cpdag(g);
        let cpdag_id = *class_ids.entry(cpdag.clone()).or_insert_with(|| {
            classes.push(ClassVisit {
                cpdag,
                first_iteration: iteration,
                members: BTreeSet::new(),
            });
            classes.len() - 1
        });
        classes[cpdag_id].members.insert(key.clone());
        dags.insert(key, DagInfo { tally: VisitTally { count: 1, log_joint: score }, cpdag_id });
        cpdag_id
    };

    // The start state is occupied before any transition.
    visit(&state.current, state.log_score, 0);

    let mut records = Vec::with_capacity(cfg.iterations / cfg.thin + 1);
    let mut edge_histogram: BTreeMap<usize, u64> = BTreeMap::new();
    let started = Instant::now();
    for _ in 0..cfg.iterations {
        let accepted = mc3_step(&mut state, cfg, scorer, &mut rng)?;
        let cpdag_id = visit(&state.current, state.log_score, state.iteration);
        if state.iteration % cfg.thin == 0 {
            let edges = state.current.arc_count();
            *edge_histogram.entry(edges).or_insert(0) += 1;
            records.push(DiagnosticsRecord {
                iteration: state.iteration,
                edges,
                log_score: state.log_score,
                accepted,
                cpdag_id,
            });
        }
    }
    let elapsed = started.elapsed().as_secs_f64();

    let visits: HashMap<Vec<Arc>, VisitTally> =
        dags.into_iter().map(|(k, info)| (k, info.tally)).collect();
    let total_visits = cfg.iterations as u64 + 1;
    let summary = ChainSummary {
        iterations: cfg.iterations,
        accepts: state.accepts,
        rejects: state.rejects,
        acc_rej_ratio: state.accepts as f64 / state.rejects as f64,
        iter_per_sec: cfg.iterations as f64 / elapsed.max(f64::MIN_POSITIVE),
        distinct_cpdags: classes.len(),
        log_phat_d: marginal_data_estimate(&visits, total_visits, cfg.top_k),
        edge_histogram,
        final_score: state.log_score,
        final_dag: state.current,
        visits,
        class_visits: classes,
    };
    Ok((records, summary))
}

/// log p̂(D): for each of the `top_k` most-visited DAGs, p(G, D) divided
/// by the visit frequency estimates the marginal; the estimates are
/// averaged in the linear domain via log-sum-exp.
pub fn marginal_data_estimate(
    visits: &HashMap<Vec<Arc>, VisitTally>,
    total_visits: u64,
    top_k: usize,
) -> f64 {
    assert!(total_visits > 0 && !visits.is_empty(), "at least one visited state required");
    let mut ranked: Vec<(&Vec<Arc>, &VisitTally)> = visits.iter().collect();
    ranked.sort_by(|a, b| b.1.count.cmp(&a.1.count).then_with(|| a.0.cmp(b.0)));
    ranked.truncate(top_k);

    let ratios: Vec<f64> = ranked
        .iter()
        .map(|(_, t)| t.log_joint - (t.count as f64 / total_visits as f64).ln())
        .collect();
    let max = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = ratios.iter().map(|r| (r - max).exp()).sum();
    max + sum.ln() - (ratios.len() as f64).ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassBoundRow {
    pub cpdag_id: usize,
    pub lower_bound: u64,
    pub observed_members: u64,
}

/// Per visited essential graph, the reversible-edge lower bound next to
/// the member count the chain actually observed, in first-visit order.
pub fn class_bound_report(class_visits: &[ClassVisit]) -> Vec<ClassBoundRow> {
    class_visits
        .iter()
        .enumerate()
        .map(|(cpdag_id, c)| ClassBoundRow {
            cpdag_id,
            lower_bound: class_size_lower_bound(&c.cpdag),
            observed_members: c.members.len() as u64,
        })
        .collect()
}
