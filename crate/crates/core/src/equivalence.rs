//! Random walks inside a Markov equivalence class (covered-arc reversals),
//! exhaustive class enumeration for small n, the class-size lower bound,
//! and the DAG / essential-graph census.

use std::collections::{HashMap, HashSet, VecDeque};

use rand::Rng;

use crate::cpdag::{dag_to_cpdag, Cpdag};
use crate::dag::{Arc, Dag, DagError};

/// Bound on the repetition count of the covered-arc-reversal walk. The
/// walk draws a repetition count uniformly from `0..=tau` on each call.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RcarConfig {
    pub tau: u32,
}

impl Default for RcarConfig {
    fn default() -> Self {
        RcarConfig { tau: 10 }
    }
}

/// Repeated Covered Arc Reversal: reverses a uniformly chosen covered arc
/// up to `tau` times (the actual count is drawn uniformly), stopping early
/// when no covered arc exists. The result is always equivalent to the
/// input.
pub fn rcar(g: &Dag, cfg: RcarConfig, rng: &mut impl Rng) -> Dag {
    let mut g = g.clone();
    let reps = rng.gen_range(0..=cfg.tau);
    for _ in 0..reps {
        let covered = g.covered_arcs();
        if covered.is_empty() {
            break;
        }
        let a = covered[rng.gen_range(0..covered.len())];
        g.reverse_arc(a).expect("covered reversal never cycles");
    }
    g
}

/// Distinct per-node priorities driving the REDS walk.
#[derive(Debug, Clone)]
pub struct VertexPriorities(Vec<f64>);

impl VertexPriorities {
    /// Fails on ties (or non-finite values); callers drawing at random
    /// should use [`VertexPriorities::sample`], which resamples instead.
    pub fn new(r: Vec<f64>) -> Result<Self, String> {
        if r.iter().any(|x| !x.is_finite()) {
            return Err("priorities must be finite".into());
        }
        let mut sorted = r.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err("priorities must be distinct".into());
        }
        Ok(VertexPriorities(r))
    }

    pub fn sample(n: usize, rng: &mut impl Rng) -> Self {
        loop {
            let r: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
            if let Ok(p) = Self::new(r) {
                return p;
            }
        }
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }
}

/// Random Equivalent DAG Selection: repeatedly reverses a uniformly chosen
/// covered arc `x_j -> x_k` with priority `r_j < r_k`, emitting the graph
/// after each reversal, until no such arc remains. Every emitted DAG is
/// equivalent to the input; termination follows because each reversal
/// strictly increases the number of arcs oriented against the priorities.
pub fn reds(g: &Dag, pr: &VertexPriorities, rng: &mut impl Rng) -> Vec<Dag> {
    let mut g = g.clone();
    let mut out = Vec::new();
    loop {
        let candidates: Vec<Arc> = g
            .covered_arcs()
            .into_iter()
            .filter(|a| pr.get(a.tail) < pr.get(a.head))
            .collect();
        if candidates.is_empty() {
            return out;
        }
        let a = candidates[rng.gen_range(0..candidates.len())];
        g.reverse_arc(a).expect("covered reversal never cycles");
        out.push(g.clone());
    }
}

pub const ENUMERATE_CLASS_MAX_N: usize = 8;

/// The full equivalence class of `g`: breadth-first closure under covered
/// arc reversals. Serves as the oracle for the essential-graph conversion.
pub fn enumerate_class(g: &Dag) -> Result<Vec<Dag>, DagError> {
    if g.n() > ENUMERATE_CLASS_MAX_N {
        return Err(DagError::SizeGuard { n: g.n(), max: ENUMERATE_CLASS_MAX_N });
    }
    let mut seen: HashSet<Vec<Arc>> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut out = Vec::new();
    seen.insert(g.arcs());
    queue.push_back(g.clone());
    while let Some(cur) = queue.pop_front() {
        for a in cur.covered_arcs() {
            let mut next = cur.clone();
            next.reverse_arc(a).expect("covered reversal never cycles");
            if seen.insert(next.arcs()) {
                queue.push_back(next.clone());
            }
        }
        out.push(cur);
    }
    Ok(out)
}

/// Lower bound on the size of the class `p` represents: over each
/// connected component of the undirected part, with `q` undirected edges,
/// the class has at least `q + 1` members, and components multiply.
pub fn class_size_lower_bound(p: &Cpdag) -> u64 {
    let n = p.n();
    let mut root: Vec<usize> = (0..n).collect();
    fn find(root: &mut Vec<usize>, x: usize) -> usize {
        if root[x] != x {
            root[x] = find(root, root[x]);
        }
        root[x]
    }
    for (u, v) in p.undirected_pairs() {
        let (ru, rv) = (find(&mut root, u), find(&mut root, v));
        root[ru] = rv;
    }
    let mut edges_per_component: HashMap<usize, u64> = HashMap::new();
    for (u, _) in p.undirected_pairs() {
        *edges_per_component.entry(find(&mut root, u)).or_insert(0) += 1;
    }
    edges_per_component.values().map(|&q| q + 1).product()
}

pub const CENSUS_MAX_N: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Census {
    pub n: usize,
    pub dags: u64,
    pub classes: u64,
    pub ratio: f64,
}

/// Visits every labeled DAG on `n` nodes exactly once, in a fixed order:
/// each unordered pair cycles through {absent, low->high, high->low} and
/// cyclic assignments are skipped.
pub fn for_each_dag(n: usize, mut f: impl FnMut(&Dag)) -> Result<(), DagError> {
    if n > CENSUS_MAX_N {
        return Err(DagError::SizeGuard { n, max: CENSUS_MAX_N });
    }
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|u| ((u + 1)..n).map(move |v| (u, v))).collect();
    let mut state = vec![0u8; pairs.len()];
    loop {
        'build: {
            let mut g = Dag::empty(n);
            for (i, &(u, v)) in pairs.iter().enumerate() {
                let arc = match state[i] {
                    0 => None,
                    1 => Some(Arc::new(u, v)),
                    _ => Some(Arc::new(v, u)),
                };
                if let Some(a) = arc {
                    if g.add_arc(a).is_err() {
                        break 'build;
                    }
                }
            }
            f(&g);
        }
        // Odometer over the pair states.
        let mut i = 0;
        loop {
            if i == state.len() {
                return Ok(());
            }
            state[i] += 1;
            if state[i] < 3 {
                break;
            }
            state[i] = 0;
            i += 1;
        }
    }
}

/// Counts labeled DAGs and their equivalence classes on `n` nodes by
/// grouping the full enumeration under the canonical essential-graph key.
pub fn census(n: usize) -> Result<Census, DagError> {
    if n > CENSUS_MAX_N {
        return Err(DagError::SizeGuard { n, max: CENSUS_MAX_N });
    }
    let mut dags = 0u64;
    let mut classes: HashSet<Cpdag> = HashSet::new();
    for_each_dag(n, |g| {
        dags += 1;
        classes.insert(dag_to_cpdag(g));
    })?;
    let class_count = classes.len() as u64;
    Ok(Census { n, dags, classes: class_count, ratio: dags as f64 / class_count as f64 })
}
