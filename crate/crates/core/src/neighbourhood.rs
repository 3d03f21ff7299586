//! The six neighbourhood operators: NR / AR / CR / NCR plus the two
//! RCAR-randomized variants, with full materialization for the
//! hill-climber and rejection sampling for the Metropolis proposals.

use std::borrow::Cow;

use rand::Rng;
use thiserror::Error;

use crate::dag::{Arc, Dag, DagError};
use crate::equivalence::{rcar, RcarConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MoveKind {
    Add,
    Remove,
    Reverse,
}

/// One local transformation; only ever emitted pre-validated against its
/// base DAG.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub kind: MoveKind,
    pub arc: Arc,
}

impl Move {
    pub fn add(tail: usize, head: usize) -> Self {
        Move { kind: MoveKind::Add, arc: Arc::new(tail, head) }
    }
    pub fn remove(tail: usize, head: usize) -> Self {
        Move { kind: MoveKind::Remove, arc: Arc::new(tail, head) }
    }
    pub fn reverse(tail: usize, head: usize) -> Self {
        Move { kind: MoveKind::Reverse, arc: Arc::new(tail, head) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeighbourhoodKind {
    /// Adds and removals only.
    Nr,
    /// Adds, removals, and every acyclicity-valid reversal.
    Ar,
    /// Adds, removals, and covered reversals only.
    Cr,
    /// Adds, removals, and non-covered valid reversals only.
    Ncr,
    /// RCAR walk first, then the NCR neighbourhood of the walked base.
    Rcarr(RcarConfig),
    /// RCAR walk first, then the NR neighbourhood of the walked base.
    Rcarnr(RcarConfig),
}

impl NeighbourhoodKind {
    /// Canonical CLI spelling.
    pub fn name(&self) -> &'static str {
        match self {
            NeighbourhoodKind::Nr => "nr",
            NeighbourhoodKind::Ar => "ar",
            NeighbourhoodKind::Cr => "cr",
            NeighbourhoodKind::Ncr => "ncr",
            NeighbourhoodKind::Rcarr(_) => "rcarr",
            NeighbourhoodKind::Rcarnr(_) => "rcarnr",
        }
    }

    pub fn is_randomized(&self) -> bool {
        matches!(self, NeighbourhoodKind::Rcarr(_) | NeighbourhoodKind::Rcarnr(_))
    }

    /// The operator applied after the (possibly trivial) RCAR step.
    fn base_kind(&self) -> NeighbourhoodKind {
        match self {
            NeighbourhoodKind::Rcarr(_) => NeighbourhoodKind::Ncr,
            NeighbourhoodKind::Rcarnr(_) => NeighbourhoodKind::Nr,
            k => *k,
        }
    }

    fn rcar_config(&self) -> Option<RcarConfig> {
        match self {
            NeighbourhoodKind::Rcarr(c) | NeighbourhoodKind::Rcarnr(c) => Some(*c),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("the move neighbourhood is empty (single-node domain)")]
pub struct EmptyNeighbourhoodError;

fn add_valid(g: &Dag, tail: usize, head: usize) -> bool {
    !g.adjacent(tail, head) && !g.has_directed_path(head, tail)
}

/// A reversal is invalid iff some other directed path tail ~> head exists.
fn reverse_valid(g: &Dag, a: Arc) -> bool {
    !has_path_avoiding(g, a.tail, a.head, a)
}

fn has_path_avoiding(g: &Dag, from: usize, to: usize, skip: Arc) -> bool {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![from];
    while let Some(u) = stack.pop() {
        if std::mem::replace(&mut seen[u], true) {
            continue;
        }
        for &c in g.children(u) {
            if u == skip.tail && c == skip.head {
                continue;
            }
            if c == to {
                return true;
            }
            if !seen[c] {
                stack.push(c);
            }
        }
    }
    false
}

fn reversal_allowed(g: &Dag, a: Arc, kind: NeighbourhoodKind) -> bool {
    match kind {
        NeighbourhoodKind::Nr => false,
        NeighbourhoodKind::Ar => reverse_valid(g, a),
        NeighbourhoodKind::Cr => g.is_covered(a).expect("arc present"),
        NeighbourhoodKind::Ncr => {
            !g.is_covered(a).expect("arc present") && reverse_valid(g, a)
        }
        _ => unreachable!("randomized kinds reduce to a base kind first"),
    }
}

/// Materializes the neighbourhood of `g`: the base DAG the moves apply to
/// (equal to `g` for the deterministic kinds, the RCAR-walked graph
/// otherwise) and every valid move, in a fixed order.
pub fn neighbourhood<'a>(
    g: &'a Dag,
    kind: NeighbourhoodKind,
    rng: &mut impl Rng,
) -> (Cow<'a, Dag>, Vec<Move>) {
    let base: Cow<'a, Dag> = match kind.rcar_config() {
        Some(cfg) => Cow::Owned(rcar(g, cfg, rng)),
        None => Cow::Borrowed(g),
    };
    let kind = kind.base_kind();
    let g = base.as_ref();
    let n = g.n();

    let mut moves = Vec::new();
    for tail in 0..n {
        for head in 0..n {
            if tail != head && !g.adjacent(tail, head) && add_valid(g, tail, head) {
                moves.push(Move::add(tail, head));
            }
        }
    }
    for a in g.arcs() {
        moves.push(Move { kind: MoveKind::Remove, arc: a });
    }
    for a in g.arcs() {
        if reversal_allowed(g, a, kind) {
            moves.push(Move { kind: MoveKind::Reverse, arc: a });
        }
    }
    (base, moves)
}

/// Move count of a deterministic kind, without materializing the list.
/// `None` for the RCAR kinds, whose neighbourhood is a random set.
pub fn neighbourhood_size(g: &Dag, kind: NeighbourhoodKind) -> Option<usize> {
    if kind.is_randomized() {
        return None;
    }
    let n = g.n();
    let mut count = 0;
    for tail in 0..n {
        for head in 0..n {
            if tail != head && !g.adjacent(tail, head) && add_valid(g, tail, head) {
                count += 1;
            }
        }
    }
    count += g.arc_count();
    for a in g.arcs() {
        if reversal_allowed(g, a, kind) {
            count += 1;
        }
    }
    Some(count)
}

/// Applies a move; an error signals the move is stale for this graph.
pub fn apply_move(g: &Dag, m: Move) -> Result<Dag, DagError> {
    let mut out = g.clone();
    match m.kind {
        MoveKind::Add => out.add_arc(m.arc)?,
        MoveKind::Remove => out.remove_arc(m.arc)?,
        MoveKind::Reverse => out.reverse_arc(m.arc)?,
    }
    Ok(out)
}

/// Uniform draw from the move set without materializing it: each ordered
/// pair (t, h) with a coin owns at most one candidate move, so rejection
/// sampling over 2·n·(n-1) slots is exactly uniform over the valid set.
pub fn random_move<'a>(
    g: &'a Dag,
    kind: NeighbourhoodKind,
    rng: &mut impl Rng,
) -> Result<(Cow<'a, Dag>, Move), EmptyNeighbourhoodError> {
    let n = g.n();
    if n < 2 {
        return Err(EmptyNeighbourhoodError);
    }
    let base: Cow<'a, Dag> = match kind.rcar_config() {
        Some(cfg) => Cow::Owned(rcar(g, cfg, rng)),
        None => Cow::Borrowed(g),
    };
    let kind = kind.base_kind();
    let m = {
        let g = base.as_ref();
        loop {
            let tail = rng.gen_range(0..n);
            let mut head = rng.gen_range(0..n - 1);
            if head >= tail {
                head += 1;
            }
            let arc = Arc::new(tail, head);
            let coin = rng.gen::<bool>();
            if g.has_arc(arc) {
                if !coin {
                    break Move { kind: MoveKind::Remove, arc };
                }
                if reversal_allowed(g, arc, kind) {
                    break Move { kind: MoveKind::Reverse, arc };
                }
            } else if !g.adjacent(tail, head) && !coin && add_valid(g, tail, head) {
                break Move { kind: MoveKind::Add, arc };
            }
        }
    };
    Ok((base, m))
}
