//! Hill-Climber Monte Carlo: greedy ascent over a (possibly
//! RCAR-randomized) neighbourhood, with bounded RCAR escapes from local
//! maxima. With tau = 0 and the AR kind this degenerates to the classic
//! deterministic hill-climber.

use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dag::Dag;
use crate::equivalence::{rcar, RcarConfig};
use crate::neighbourhood::{
    apply_move, neighbourhood, EmptyNeighbourhoodError, Move, NeighbourhoodKind,
};
use crate::scoring::{BdeuScorer, ScoreError};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("invalid search configuration: {0}")]
    Config(String),
    #[error(transparent)]
    EmptyNeighbourhood(#[from] EmptyNeighbourhoodError),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

#[derive(Debug, Clone)]
pub struct HcmcConfig {
    pub kind: NeighbourhoodKind,
    /// Consecutive failed escape attempts tolerated before stopping.
    pub max_trials: u32,
    /// Cap on accepted moves; `None` means 10 * n^2. Bounds plateau cycling.
    pub max_steps: Option<usize>,
    pub seed: u64,
    /// Starting structure; the empty graph when absent.
    pub start: Option<Dag>,
}

impl HcmcConfig {
    pub fn new(kind: NeighbourhoodKind) -> Self {
        HcmcConfig { kind, max_trials: 50, max_steps: None, seed: 0, start: None }
    }
}

#[derive(Debug, Clone)]
pub struct StepRecord {
    pub step: usize,
    pub log_score: f64,
    pub mv: Move,
    /// Escape-trial counter in effect when the move was accepted.
    pub trials: u32,
}

#[derive(Debug, Clone)]
pub struct SearchTrace {
    pub records: Vec<StepRecord>,
    pub steps: usize,
    pub secs_per_step: f64,
    pub final_score: f64,
}

/// Greedy step choice: a move of maximal score delta, ties broken
/// uniformly at random. Tie detection is exact float equality, which is
/// what symmetric families actually produce.
pub fn pick_best(
    base: &Dag,
    moves: &[Move],
    scorer: &BdeuScorer,
    rng: &mut impl Rng,
) -> Result<(Move, f64), SearchError> {
    if moves.is_empty() {
        return Err(EmptyNeighbourhoodError.into());
    }
    let mut best = f64::NEG_INFINITY;
    let mut ties: Vec<Move> = Vec::new();
    for &m in moves {
        let delta = scorer.delta(base, m)?;
        if delta > best {
            best = delta;
            ties.clear();
            ties.push(m);
        } else if delta == best {
            ties.push(m);
        }
    }
    Ok((ties[rng.gen_range(0..ties.len())], best))
}

/// The search loop: randomize within the current equivalence class (for
/// the RCAR kinds), take the best neighbour while it does not score worse,
/// and otherwise escape by RCAR up to `max_trials` times in a row.
pub fn hcmc(scorer: &BdeuScorer, cfg: &HcmcConfig) -> Result<(Dag, SearchTrace), SearchError> {
    let n = scorer.data().n_vars();
    let max_steps = cfg.max_steps.unwrap_or(10 * n * n);
    if max_steps == 0 {
        return Err(SearchError::Config("max_steps must be >= 1".into()));
    }
    let mut g = match &cfg.start {
        Some(start) if start.n() != n => {
            return Err(SearchError::Config(format!(
                "start graph has {} nodes but the dataset has {n} variables",
                start.n()
            )));
        }
        Some(start) => start.clone(),
        None => Dag::empty(n),
    };
    // The escape walk reuses the in-loop RCAR bound; tau = 0 for the
    // deterministic kinds, for which escapes are no-ops.
    let escape = match cfg.kind {
        NeighbourhoodKind::Rcarr(c) | NeighbourhoodKind::Rcarnr(c) => c,
        _ => RcarConfig { tau: 0 },
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut score = scorer.score(&g)?;
    let mut records = Vec::new();
    let mut steps = 0usize;
    let mut trials = 0u32;
    let started = Instant::now();

    while steps < max_steps {
        let (base, moves) = neighbourhood(&g, cfg.kind, &mut rng);
        g = base.into_owned();
        let (mv, delta) = pick_best(&g, &moves, scorer, &mut rng)?;
        if delta >= 0.0 {
            g = apply_move(&g, mv).map_err(ScoreError::from)?;
            score += delta;
            records.push(StepRecord { step: steps, log_score: score, mv, trials });
            steps += 1;
            trials = 0;
        } else if trials < cfg.max_trials {
            g = rcar(&g, escape, &mut rng);
            trials += 1;
        } else {
            break;
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    let trace = SearchTrace {
        records,
        steps,
        secs_per_step: if steps > 0 { elapsed / steps as f64 } else { 0.0 },
        final_score: scorer.score(&g)?,
    };
    Ok((g, trace))
}
