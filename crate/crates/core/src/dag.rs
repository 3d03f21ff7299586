//! Labeled DAGs stored as per-node parent/child sets, with acyclicity-safe
//! mutation and the covered-arc machinery used by equivalence walks.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use thiserror::Error;

use crate::ParseError;

/// A directed arc `tail -> head`. Self-loops are unrepresentable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub tail: usize,
    pub head: usize,
}

impl Arc {
    /// Panics on `tail == head`; arcs between a node and itself never exist.
    pub fn new(tail: usize, head: usize) -> Self {
        assert!(tail != head, "self-loop arc {tail} -> {tail}");
        Arc { tail, head }
    }

    pub fn reversed(self) -> Self {
        Arc { tail: self.head, head: self.tail }
    }
}

impl fmt::Display for Arc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.tail, self.head)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DagError {
    #[error("adding {0} would close a directed cycle")]
    Cycle(Arc),
    #[error("arc {0} already present (in one direction or the other)")]
    DuplicateArc(Arc),
    #[error("arc {0} not present")]
    MissingArc(Arc),
    #[error("node index {index} out of range for {n} nodes")]
    NodeIndex { index: usize, n: usize },
    #[error("graphs have different node counts: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("n = {n} exceeds the enumeration guard (max {max})")]
    SizeGuard { n: usize, max: usize },
}

/// Node-labeled acyclic digraph. Node identity is positional; labels are
/// metadata only and are ignored by equality and hashing.
///
/// Parent and child sets are kept in sync; every mutator preserves
/// acyclicity or fails without touching the graph.
#[derive(Debug, Clone)]
pub struct Dag {
    labels: Vec<String>,
    parents: Vec<BTreeSet<usize>>,
    children: Vec<BTreeSet<usize>>,
}

impl PartialEq for Dag {
    fn eq(&self, other: &Self) -> bool {
        self.parents == other.parents
    }
}

impl Eq for Dag {}

impl Hash for Dag {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.parents.hash(state);
    }
}

impl Dag {
    /// Arc-free graph on `n` nodes labeled `x0..x{n-1}`.
    pub fn empty(n: usize) -> Self {
        Self::with_labels((0..n).map(|i| format!("x{i}")).collect())
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        let n = labels.len();
        Dag {
            labels,
            parents: vec![BTreeSet::new(); n],
            children: vec![BTreeSet::new(); n],
        }
    }

    pub fn from_arcs(n: usize, arcs: &[Arc]) -> Result<Self, DagError> {
        let mut g = Dag::empty(n);
        for &a in arcs {
            g.add_arc(a)?;
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.parents.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn parents(&self, v: usize) -> &BTreeSet<usize> {
        &self.parents[v]
    }

    pub fn children(&self, v: usize) -> &BTreeSet<usize> {
        &self.children[v]
    }

    pub fn has_arc(&self, a: Arc) -> bool {
        a.tail < self.n() && self.children[a.tail].contains(&a.head)
    }

    /// True when an arc joins `u` and `v` in either direction.
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.children[u].contains(&v) || self.children[v].contains(&u)
    }

    pub fn arc_count(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    /// All arcs in (tail, head) order.
    pub fn arcs(&self) -> Vec<Arc> {
        let mut out = Vec::with_capacity(self.arc_count());
        for tail in 0..self.n() {
            for &head in &self.children[tail] {
                out.push(Arc { tail, head });
            }
        }
        out
    }

    fn check_node(&self, v: usize) -> Result<(), DagError> {
        if v < self.n() {
            Ok(())
        } else {
            Err(DagError::NodeIndex { index: v, n: self.n() })
        }
    }

    fn check_arc_nodes(&self, a: Arc) -> Result<(), DagError> {
        self.check_node(a.tail)?;
        self.check_node(a.head)
    }

    /// Directed path `from ~> to` (including the trivial path `from == to`).
    pub fn has_directed_path(&self, from: usize, to: usize) -> bool {
        if from == to {
            return true;
        }
        let mut seen = vec![false; self.n()];
        let mut stack = vec![from];
        while let Some(u) = stack.pop() {
            if u == to {
                return true;
            }
            if std::mem::replace(&mut seen[u], true) {
                continue;
            }
            stack.extend(self.children[u].iter().copied());
        }
        false
    }

    /// Inserts `a`; fails if either direction is already present or a
    /// directed path `head ~> tail` would close a cycle.
    pub fn add_arc(&mut self, a: Arc) -> Result<(), DagError> {
        self.check_arc_nodes(a)?;
        if self.adjacent(a.tail, a.head) {
            return Err(DagError::DuplicateArc(a));
        }
        if self.has_directed_path(a.head, a.tail) {
            return Err(DagError::Cycle(a));
        }
        self.children[a.tail].insert(a.head);
        self.parents[a.head].insert(a.tail);
        Ok(())
    }

    /// Deletes `a`; removal can never create a cycle.
    pub fn remove_arc(&mut self, a: Arc) -> Result<(), DagError> {
        self.check_arc_nodes(a)?;
        if !self.has_arc(a) {
            return Err(DagError::MissingArc(a));
        }
        self.children[a.tail].remove(&a.head);
        self.parents[a.head].remove(&a.tail);
        Ok(())
    }

    /// Replaces `a` by its reverse; fails iff a directed path
    /// `tail ~> head` of length >= 2 remains after deleting `a`.
    pub fn reverse_arc(&mut self, a: Arc) -> Result<(), DagError> {
        self.check_arc_nodes(a)?;
        if !self.has_arc(a) {
            return Err(DagError::MissingArc(a));
        }
        self.children[a.tail].remove(&a.head);
        self.parents[a.head].remove(&a.tail);
        if self.has_directed_path(a.tail, a.head) {
            self.children[a.tail].insert(a.head);
            self.parents[a.head].insert(a.tail);
            return Err(DagError::Cycle(a.reversed()));
        }
        self.children[a.head].insert(a.tail);
        self.parents[a.tail].insert(a.head);
        Ok(())
    }

    /// An arc `a -> b` is covered when `pa(b) = pa(a) ∪ {a}`; reversing a
    /// covered arc stays inside the equivalence class.
    pub fn is_covered(&self, a: Arc) -> Result<bool, DagError> {
        self.check_arc_nodes(a)?;
        if !self.has_arc(a) {
            return Err(DagError::MissingArc(a));
        }
        let pa_head = &self.parents[a.head];
        let pa_tail = &self.parents[a.tail];
        if pa_head.len() != pa_tail.len() + 1 {
            return Ok(false);
        }
        Ok(pa_head.iter().all(|&p| p == a.tail || pa_tail.contains(&p)))
    }

    /// All covered arcs, in (tail, head) order.
    pub fn covered_arcs(&self) -> Vec<Arc> {
        self.arcs()
            .into_iter()
            .filter(|&a| self.is_covered(a).expect("arc from arcs() is present"))
            .collect()
    }

    /// Unordered adjacency pairs (u, v) with u < v.
    pub fn skeleton(&self) -> BTreeSet<(usize, usize)> {
        let mut out = BTreeSet::new();
        for a in self.arcs() {
            let (u, v) = if a.tail < a.head { (a.tail, a.head) } else { (a.head, a.tail) };
            out.insert((u, v));
        }
        out
    }

    /// Immoralities as canonical triples (a, b, c): a -> c <- b with a < b
    /// and a, b non-adjacent.
    pub fn immoralities(&self) -> BTreeSet<(usize, usize, usize)> {
        let mut out = BTreeSet::new();
        for c in 0..self.n() {
            let pa: Vec<usize> = self.parents[c].iter().copied().collect();
            for i in 0..pa.len() {
                for j in (i + 1)..pa.len() {
                    if !self.adjacent(pa[i], pa[j]) {
                        out.insert((pa[i], pa[j], c));
                    }
                }
            }
        }
        out
    }

    /// Markov equivalence via the skeleton + immoralities characterization.
    pub fn equivalent(&self, other: &Dag) -> Result<bool, DagError> {
        if self.n() != other.n() {
            return Err(DagError::DimensionMismatch { left: self.n(), right: other.n() });
        }
        Ok(self.skeleton() == other.skeleton() && self.immoralities() == other.immoralities())
    }

    /// Kahn ordering; total by construction since the graph is acyclic.
    pub fn topological_order(&self) -> Vec<usize> {
        let n = self.n();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.parents[v].len()).collect();
        let mut ready: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        // Pop the smallest ready node so the order is deterministic.
        while let Some(&u) = ready.iter().min() {
            ready.retain(|&v| v != u);
            order.push(u);
            for &c in &self.children[u] {
                indeg[c] -= 1;
                if indeg[c] == 0 {
                    ready.push(c);
                }
            }
        }
        debug_assert_eq!(order.len(), n, "graph invariant violated: cycle present");
        order
    }
}

/// Random DAG: each pair (u, v) with u earlier in a random node order gets
/// the arc u -> v with probability `edge_prob`.
pub fn random_dag(n: usize, edge_prob: f64, rng: &mut impl rand::Rng) -> Dag {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut g = Dag::empty(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen::<f64>() < edge_prob {
                g.add_arc(Arc::new(order[i], order[j])).expect("forward arc in a total order");
            }
        }
    }
    g
}

// --- .dag text format ---------------------------------------------------
//
// line 1:   nodes: a,b,c
// then one `tail -> head` line per arc, lexicographic in (tail, head);
// blank lines and `#` comments are ignored on input.

impl fmt::Display for Dag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes: {}", self.labels.join(","))?;
        for a in self.arcs() {
            writeln!(f, "{} -> {}", self.labels[a.tail], self.labels[a.head])?;
        }
        Ok(())
    }
}

impl FromStr for Dag {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        let mut dag: Option<Dag> = None;
        for (idx, raw) in s.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            match &mut dag {
                None => {
                    let rest = line
                        .strip_prefix("nodes:")
                        .ok_or_else(|| ParseError::new(lineno, "expected `nodes: a,b,...`"))?;
                    let labels: Vec<String> =
                        rest.split(',').map(|l| l.trim().to_string()).collect();
                    if labels.iter().any(|l| l.is_empty()) {
                        return Err(ParseError::new(lineno, "empty node label"));
                    }
                    let mut uniq = BTreeSet::new();
                    for l in &labels {
                        if !uniq.insert(l.clone()) {
                            return Err(ParseError::new(lineno, format!("duplicate node label `{l}`")));
                        }
                    }
                    dag = Some(Dag::with_labels(labels));
                }
                Some(g) => {
                    let (tail, head) = line
                        .split_once("->")
                        .ok_or_else(|| ParseError::new(lineno, "expected `tail -> head`"))?;
                    let tail = tail.trim();
                    let head = head.trim();
                    let find = |name: &str| {
                        g.labels.iter().position(|l| l == name).ok_or_else(|| {
                            ParseError::new(lineno, format!("unknown node `{name}`"))
                        })
                    };
                    let a = Arc::new(find(tail)?, find(head)?);
                    g.add_arc(a)
                        .map_err(|e| ParseError::new(lineno, e.to_string()))?;
                }
            }
        }
        dag.ok_or_else(|| ParseError::new(0, "missing `nodes:` line"))
    }
}
