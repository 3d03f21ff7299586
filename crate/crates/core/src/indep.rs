//! d-separation and the induced independence model, restricted to
//! elementary triplets (singleton endpoints), which determine the full
//! model for DAGs.

use std::collections::BTreeSet;

use crate::dag::{Dag, DagError};

/// Elementary conditional-independence statement `u ⊥ v | S`, stored with
/// `u < v`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementaryTriplet {
    pub u: usize,
    pub v: usize,
    pub s: BTreeSet<usize>,
}

impl ElementaryTriplet {
    pub fn new(u: usize, v: usize, s: BTreeSet<usize>) -> Self {
        assert!(u != v && !s.contains(&u) && !s.contains(&v));
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        ElementaryTriplet { u, v, s }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceModel {
    pub n: usize,
    pub triplets: BTreeSet<ElementaryTriplet>,
}

impl IndependenceModel {
    pub fn is_subset_of(&self, other: &IndependenceModel) -> bool {
        self.triplets.is_subset(&other.triplets)
    }
}

/// Guard for the 2^(n-2) subset enumeration in `independence_model`.
pub const INDEPENDENCE_MODEL_MAX_N: usize = 12;

/// d-separation of `u` and `v` given `S`, decided on the moralized
/// ancestral graph: `u ⊥ v | S` iff S separates u from v in the moral
/// graph of the subgraph induced by the ancestral closure of {u, v} ∪ S.
pub fn d_separated(g: &Dag, u: usize, v: usize, s: &BTreeSet<usize>) -> Result<bool, DagError> {
    let n = g.n();
    for &x in s.iter().chain([u, v].iter()) {
        if x >= n {
            return Err(DagError::NodeIndex { index: x, n });
        }
    }
    assert!(u != v && !s.contains(&u) && !s.contains(&v));

    // Ancestral closure of the seeds.
    let mut relevant = vec![false; n];
    let mut stack: Vec<usize> = s.iter().copied().chain([u, v]).collect();
    while let Some(x) = stack.pop() {
        if std::mem::replace(&mut relevant[x], true) {
            continue;
        }
        stack.extend(g.parents(x).iter().copied());
    }

    // Moralize within the closure: undirect arcs, marry co-parents.
    let mut adj = vec![BTreeSet::new(); n];
    for y in 0..n {
        if !relevant[y] {
            continue;
        }
        let pa: Vec<usize> = g.parents(y).iter().copied().collect();
        for &p in &pa {
            adj[y].insert(p);
            adj[p].insert(y);
        }
        for i in 0..pa.len() {
            for j in (i + 1)..pa.len() {
                adj[pa[i]].insert(pa[j]);
                adj[pa[j]].insert(pa[i]);
            }
        }
    }

    // BFS from u avoiding S.
    let mut seen = vec![false; n];
    let mut queue = vec![u];
    while let Some(x) = queue.pop() {
        if x == v {
            return Ok(false);
        }
        if std::mem::replace(&mut seen[x], true) {
            continue;
        }
        for &y in &adj[x] {
            if !seen[y] && !s.contains(&y) {
                queue.push(y);
            }
        }
    }
    Ok(true)
}

/// All elementary triplets that hold in `g` under d-separation.
pub fn independence_model(g: &Dag) -> Result<IndependenceModel, DagError> {
    let n = g.n();
    if n > INDEPENDENCE_MODEL_MAX_N {
        return Err(DagError::SizeGuard { n, max: INDEPENDENCE_MODEL_MAX_N });
    }
    let mut triplets = BTreeSet::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let rest: Vec<usize> = (0..n).filter(|&x| x != u && x != v).collect();
            for mask in 0u32..(1u32 << rest.len()) {
                let s: BTreeSet<usize> = rest
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &x)| x)
                    .collect();
                if d_separated(g, u, v, &s)? {
                    triplets.insert(ElementaryTriplet { u, v, s });
                }
            }
        }
    }
    Ok(IndependenceModel { n, triplets })
}

/// `I(G) ⊆ I(H)` on elementary triplets.
pub fn model_included(g: &Dag, h: &Dag) -> Result<bool, DagError> {
    if g.n() != h.n() {
        return Err(DagError::DimensionMismatch { left: g.n(), right: h.n() });
    }
    Ok(independence_model(g)?.is_subset_of(&independence_model(h)?))
}
