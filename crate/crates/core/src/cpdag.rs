//! Essential graphs (CPDAGs): one mark per adjacent unordered pair, either
//! compelled (directed in every member of the equivalence class) or
//! reversible (undirected).

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::dag::{Arc, Dag, DagError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairMark {
    Directed { tail: usize, head: usize },
    Undirected,
}

/// Canonical representative of a Markov equivalence class. Keys are
/// unordered pairs `(u, v)` with `u < v`; equality and hashing are
/// canonical because the map is ordered.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cpdag {
    n: usize,
    edges: BTreeMap<(usize, usize), PairMark>,
}

impl Cpdag {
    pub fn new(n: usize) -> Self {
        Cpdag { n, edges: BTreeMap::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn mark(&self, u: usize, v: usize) -> Option<PairMark> {
        self.edges.get(&Self::pair(u, v)).copied()
    }

    pub fn set_directed(&mut self, tail: usize, head: usize) {
        assert!(tail != head && tail < self.n && head < self.n);
        self.edges.insert(Self::pair(tail, head), PairMark::Directed { tail, head });
    }

    pub fn set_undirected(&mut self, u: usize, v: usize) {
        assert!(u != v && u < self.n && v < self.n);
        self.edges.insert(Self::pair(u, v), PairMark::Undirected);
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((usize, usize), PairMark)> + '_ {
        self.edges.iter().map(|(&p, &m)| (p, m))
    }

    pub fn undirected_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges
            .iter()
            .filter(|(_, &m)| m == PairMark::Undirected)
            .map(|(&p, _)| p)
    }

    fn pair(u: usize, v: usize) -> (usize, usize) {
        if u < v { (u, v) } else { (v, u) }
    }
}

/// Serialized form, pairs in lexicographic order: `0-1;1>2;3<4` where `-`
/// is undirected, `>` points low-to-high and `<` high-to-low. Used as the
/// canonical class key.
impl fmt::Display for Cpdag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (&(u, v), &m) in &self.edges {
            if !first {
                write!(f, ";")?;
            }
            first = false;
            match m {
                PairMark::Undirected => write!(f, "{u}-{v}")?,
                PairMark::Directed { tail, .. } if tail == u => write!(f, "{u}>{v}")?,
                PairMark::Directed { .. } => write!(f, "{u}<{v}")?,
            }
        }
        Ok(())
    }
}

/// Essential graph of `g`, computed by ordering the arcs along a
/// topological sort and propagating compelled labels (Chickering's
/// transformational labeling). Conformance against the class-enumeration
/// oracle is checked exhaustively in tests.
pub fn dag_to_cpdag(g: &Dag) -> Cpdag {
    let order = edge_ordering(g);
    let compelled = label_compelled(g, &order);
    let mut out = Cpdag::new(g.n());
    for (i, &a) in order.iter().enumerate() {
        if compelled[i] {
            out.set_directed(a.tail, a.head);
        } else {
            out.set_undirected(a.tail, a.head);
        }
    }
    out
}

/// Arcs ordered so that heads ascend in topological order and, per head,
/// tails descend. This is the total order the labeling pass consumes.
fn edge_ordering(g: &Dag) -> Vec<Arc> {
    let topo = g.topological_order();
    let mut pos = vec![0usize; g.n()];
    for (i, &v) in topo.iter().enumerate() {
        pos[v] = i;
    }
    let mut order = Vec::with_capacity(g.arc_count());
    for &y in &topo {
        let mut pa: Vec<usize> = g.parents(y).iter().copied().collect();
        pa.sort_by_key(|&x| std::cmp::Reverse(pos[x]));
        for x in pa {
            order.push(Arc::new(x, y));
        }
    }
    order
}

fn label_compelled(g: &Dag, order: &[Arc]) -> Vec<bool> {
    #[derive(Clone, Copy, PartialEq)]
    enum Label {
        Unknown,
        Compelled,
        Reversible,
    }
    let index: HashMap<Arc, usize> =
        order.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let mut label = vec![Label::Unknown; order.len()];

    'outer: loop {
        let Some(i) = label.iter().position(|&l| l == Label::Unknown) else {
            break;
        };
        let Arc { tail: x, head: y } = order[i];
        for &w in g.parents(x) {
            if label[index[&Arc::new(w, x)]] != Label::Compelled {
                continue;
            }
            if !g.parents(y).contains(&w) {
                // A compelled w -> x with w not a parent of y forces the
                // whole in-neighbourhood of y.
                for &z in g.parents(y) {
                    label[index[&Arc::new(z, y)]] = Label::Compelled;
                }
                continue 'outer;
            }
            label[index[&Arc::new(w, y)]] = Label::Compelled;
        }
        let has_external_parent =
            g.parents(y).iter().any(|&z| z != x && !g.parents(x).contains(&z));
        let verdict = if has_external_parent { Label::Compelled } else { Label::Reversible };
        for &z in g.parents(y) {
            let zi = index[&Arc::new(z, y)];
            if label[zi] == Label::Unknown {
                label[zi] = verdict;
            }
        }
    }
    label.into_iter().map(|l| l == Label::Compelled).collect()
}

/// Number of unordered pairs whose mark differs, over the mark domain
/// {absent, low->high, high->low, undirected}. Symmetric; zero iff equal.
pub fn structural_difference(p: &Cpdag, q: &Cpdag) -> Result<usize, DagError> {
    if p.n() != q.n() {
        return Err(DagError::DimensionMismatch { left: p.n(), right: q.n() });
    }
    let mut diff = 0;
    for (&pair, &m) in &p.edges {
        if q.edges.get(&pair) != Some(&m) {
            diff += 1;
        }
    }
    for &pair in q.edges.keys() {
        if !p.edges.contains_key(&pair) {
            diff += 1;
        }
    }
    Ok(diff)
}
