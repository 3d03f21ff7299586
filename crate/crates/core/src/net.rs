//! Bayesian networks (structure + CPTs): a block text format, forward
//! sampling of synthetic datasets, and a random-network generator for
//! benchmarks.

use std::fmt;
use std::io;
use std::path::Path;

use rand::Rng;
use thiserror::Error;

use crate::dag::{Arc, Dag};
use crate::data::Dataset;
use crate::ParseError;

pub const ROW_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum NetError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("invalid network: {0}")]
    Validation(String),
}

/// Discrete Bayesian network. CPT rows are indexed by parent
/// configuration (mixed-radix over the parents in ascending node order,
/// last parent fastest) and hold one probability per child state.
#[derive(Debug, Clone, PartialEq)]
pub struct BayesNet {
    structure: Dag,
    states: Vec<Vec<String>>,
    cpts: Vec<Vec<f64>>,
}

impl BayesNet {
    pub fn new(
        structure: Dag,
        states: Vec<Vec<String>>,
        cpts: Vec<Vec<f64>>,
    ) -> Result<Self, NetError> {
        let net = BayesNet { structure, states, cpts };
        net.validate()?;
        Ok(net)
    }

    fn validate(&self) -> Result<(), NetError> {
        let n = self.structure.n();
        if n == 0 {
            return Err(NetError::Validation("network has no nodes".into()));
        }
        if self.states.len() != n || self.cpts.len() != n {
            return Err(NetError::Validation("states/cpts length mismatch".into()));
        }
        for v in 0..n {
            let name = self.structure.label(v);
            let r = self.states[v].len();
            if r < 2 {
                return Err(NetError::Validation(format!(
                    "node `{name}` needs at least 2 states"
                )));
            }
            let q: usize =
                self.structure.parents(v).iter().map(|&p| self.states[p].len()).product();
            if self.cpts[v].len() != q * r {
                return Err(NetError::Validation(format!(
                    "node `{name}`: expected {q} cpt rows of {r} entries, got {} values",
                    self.cpts[v].len()
                )));
            }
            for j in 0..q {
                let row = &self.cpts[v][j * r..(j + 1) * r];
                if row.iter().any(|&p| !(p >= 0.0)) {
                    return Err(NetError::Validation(format!(
                        "node `{name}`: negative or NaN probability in row {j}"
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > ROW_SUM_TOLERANCE {
                    return Err(NetError::Validation(format!(
                        "node `{name}`: cpt row {j} sums to {sum}, not 1"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn structure(&self) -> &Dag {
        &self.structure
    }

    pub fn n(&self) -> usize {
        self.structure.n()
    }

    pub fn arity(&self, v: usize) -> usize {
        self.states[v].len()
    }

    pub fn states(&self, v: usize) -> &[String] {
        &self.states[v]
    }

    pub fn cpt(&self, v: usize) -> &[f64] {
        &self.cpts[v]
    }

    /// Row index for node `v` given a full assignment of values.
    pub fn config_index(&self, v: usize, values: &[usize]) -> usize {
        let mut j = 0;
        for &p in self.structure.parents(v) {
            j = j * self.states[p].len() + values[p];
        }
        j
    }

    pub fn parse(text: &str) -> Result<Self, NetError> {
        parse_net(text)
    }

    pub fn load(path: &Path) -> Result<Self, NetError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<(), NetError> {
        std::fs::write(path, self.to_string())?;
        Ok(())
    }
}

/// Node blocks in node order, parents listed in ascending node order,
/// probabilities with 17 significant digits so the round-trip is lossless.
impl fmt::Display for BayesNet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in 0..self.n() {
            if v > 0 {
                writeln!(f)?;
            }
            writeln!(f, "node {}", self.structure.label(v))?;
            writeln!(f, "states {}", self.states[v].join(" "))?;
            let parent_names: Vec<&str> =
                self.structure.parents(v).iter().map(|&p| self.structure.label(p)).collect();
            writeln!(f, "parents {}", parent_names.join(" "))?;
            writeln!(f, "cpt")?;
            let r = self.arity(v);
            for row in self.cpts[v].chunks(r) {
                let cells: Vec<String> = row.iter().map(|p| format!("{p:.16e}")).collect();
                writeln!(f, "{}", cells.join(" "))?;
            }
            writeln!(f, "end")?;
        }
        Ok(())
    }
}

struct RawBlock {
    name: String,
    name_line: usize,
    states: Vec<String>,
    parents: Vec<String>,
    rows: Vec<(usize, Vec<f64>)>,
}

fn parse_net(text: &str) -> Result<BayesNet, NetError> {
    let mut blocks: Vec<RawBlock> = Vec::new();
    let mut current: Option<RawBlock> = None;
    let mut saw_states = false;
    let mut saw_parents = false;
    let mut in_cpt = false;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let keyword = tokens.next().unwrap();
        match (&mut current, keyword) {
            (None, "node") => {
                let name = tokens.next().ok_or_else(|| ParseError::new(lineno, "node needs a name"))?;
                if tokens.next().is_some() {
                    return Err(ParseError::new(lineno, "node name cannot contain spaces").into());
                }
                current = Some(RawBlock {
                    name: name.to_string(),
                    name_line: lineno,
                    states: Vec::new(),
                    parents: Vec::new(),
                    rows: Vec::new(),
                });
                saw_states = false;
                saw_parents = false;
                in_cpt = false;
            }
            (None, _) => {
                return Err(ParseError::new(lineno, format!("expected `node`, got `{keyword}`")).into())
            }
            (Some(block), "states") if !in_cpt => {
                block.states = tokens.map(str::to_string).collect();
                saw_states = true;
            }
            (Some(block), "parents") if !in_cpt => {
                block.parents = tokens.map(str::to_string).collect();
                saw_parents = true;
            }
            (Some(_), "cpt") if !in_cpt => {
                in_cpt = true;
            }
            (Some(_), "end") => {
                if !(saw_states && saw_parents && in_cpt) {
                    return Err(ParseError::new(
                        lineno,
                        "block needs `states`, `parents` and `cpt` before `end`",
                    )
                    .into());
                }
                blocks.push(current.take().unwrap());
            }
            (Some(block), _) if in_cpt => {
                let mut row = Vec::new();
                for tok in line.split_whitespace() {
                    let p: f64 = tok.parse().map_err(|_| {
                        ParseError::new(lineno, format!("`{tok}` is not a probability"))
                    })?;
                    row.push(p);
                }
                block.rows.push((lineno, row));
            }
            (Some(_), _) => {
                return Err(ParseError::new(lineno, format!("unexpected `{keyword}`")).into())
            }
        }
    }
    if current.is_some() {
        return Err(NetError::Validation("unterminated node block (missing `end`)".into()));
    }
    if blocks.is_empty() {
        return Err(NetError::Validation("no node blocks found".into()));
    }

    // Resolve names; blocks are order-independent with respect to parents.
    let labels: Vec<String> = blocks.iter().map(|b| b.name.clone()).collect();
    let index_of = |name: &str, lineno: usize| {
        labels
            .iter()
            .position(|l| l == name)
            .ok_or_else(|| ParseError::new(lineno, format!("unknown node `{name}`")))
    };
    for i in 0..blocks.len() {
        for j in (i + 1)..blocks.len() {
            if blocks[i].name == blocks[j].name {
                return Err(ParseError::new(
                    blocks[j].name_line,
                    format!("duplicate node `{}`", blocks[j].name),
                )
                .into());
            }
        }
    }

    let mut structure = Dag::with_labels(labels.clone());
    for (v, block) in blocks.iter().enumerate() {
        for p in &block.parents {
            let pi = index_of(p, block.name_line)?;
            structure.add_arc(Arc::new(pi, v)).map_err(|e| {
                NetError::Validation(format!("node `{}`: {e}", block.name))
            })?;
        }
    }

    let mut states = Vec::with_capacity(blocks.len());
    let mut cpts = Vec::with_capacity(blocks.len());
    for (v, block) in blocks.iter().enumerate() {
        let r = block.states.len();
        let declared: Vec<usize> = block
            .parents
            .iter()
            .map(|p| index_of(p, block.name_line))
            .collect::<Result<_, _>>()?;
        let arity = |p: usize| blocks[p].states.len();
        let q: usize = declared.iter().map(|&p| arity(p)).product();
        if block.rows.len() != q {
            return Err(NetError::Validation(format!(
                "node `{}`: expected {q} cpt rows, got {}",
                block.name,
                block.rows.len()
            )));
        }
        for (lineno, row) in &block.rows {
            if row.len() != r {
                return Err(ParseError::new(
                    *lineno,
                    format!("expected {r} probabilities, got {}", row.len()),
                )
                .into());
            }
        }

        // Reindex rows from the declared parent order to ascending node
        // order (both mixed-radix, last parent fastest).
        let sorted: Vec<usize> = structure.parents(v).iter().copied().collect();
        let mut flat = vec![0.0; q * r];
        let mut assignment = vec![0usize; declared.len()];
        for canonical in 0..q {
            // Decode `canonical` over the sorted parents.
            let mut rem = canonical;
            for i in (0..sorted.len()).rev() {
                assignment[i] = rem % arity(sorted[i]);
                rem /= arity(sorted[i]);
            }
            let mut source = 0usize;
            for (i, &d) in declared.iter().enumerate() {
                let pos = sorted.iter().position(|&s| s == d).unwrap();
                source = source * arity(declared[i]) + assignment[pos];
            }
            flat[canonical * r..(canonical + 1) * r].copy_from_slice(&block.rows[source].1);
        }
        states.push(block.states.clone());
        cpts.push(flat);
    }

    BayesNet::new(structure, states, cpts)
}

/// Draws `count` i.i.d. records in topological order; the same stream
/// yields the same dataset.
pub fn forward_sample(net: &BayesNet, count: usize, rng: &mut impl Rng) -> Dataset {
    let order = net.structure.topological_order();
    let n = net.n();
    let mut rows = Vec::with_capacity(count);
    let mut values = vec![0usize; n];
    for _ in 0..count {
        for &v in &order {
            let r = net.arity(v);
            let j = net.config_index(v, &values);
            let row = &net.cpts[v][j * r..(j + 1) * r];
            let mut u = rng.gen::<f64>();
            let mut pick = r - 1;
            for (k, &p) in row.iter().enumerate() {
                if u < p {
                    pick = k;
                    break;
                }
                u -= p;
            }
            values[v] = pick;
        }
        rows.push(values.clone());
    }
    let labels = net.structure.labels().to_vec();
    let states = (0..n).map(|v| net.states[v].to_vec()).collect();
    Dataset::new(labels, states, rows).expect("sampled values respect arities")
}

/// Random benchmark network: a random DAG with `target_arcs` arcs (parent
/// sets capped at `max_parents`) and peaked CPT rows, so sampled data
/// carries learnable signal. Every node gets `arity` states.
pub fn random_network(
    n: usize,
    target_arcs: usize,
    max_parents: usize,
    arity: usize,
    rng: &mut impl Rng,
) -> BayesNet {
    use rand::seq::SliceRandom;
    assert!(n >= 1 && arity >= 2);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut structure = Dag::empty(n);
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(rng);
    let mut added = 0;
    for (i, j) in pairs {
        if added == target_arcs {
            break;
        }
        let (tail, head) = (order[i], order[j]);
        if structure.parents(head).len() < max_parents {
            structure.add_arc(Arc::new(tail, head)).expect("forward arc in a total order");
            added += 1;
        }
    }

    let states: Vec<Vec<String>> =
        (0..n).map(|_| (0..arity).map(|s| format!("s{s}")).collect()).collect();
    let mut cpts = Vec::with_capacity(n);
    for v in 0..n {
        let q: usize = structure.parents(v).iter().map(|_| arity).product();
        let mut flat = Vec::with_capacity(q * arity);
        for _ in 0..q {
            // One dominant state per row keeps parent-child dependence strong.
            let dominant = rng.gen_range(0..arity);
            let w = rng.gen_range(0.75..0.95);
            let mut rest: Vec<f64> = (0..arity - 1).map(|_| rng.gen_range(0.5..1.5)).collect();
            let norm: f64 = rest.iter().sum();
            for x in &mut rest {
                *x *= (1.0 - w) / norm;
            }
            let mut row = Vec::with_capacity(arity);
            let mut it = rest.into_iter();
            for k in 0..arity {
                row.push(if k == dominant { w } else { it.next().unwrap() });
            }
            flat.extend(row);
        }
        cpts.push(flat);
    }
    BayesNet::new(structure, states, cpts).expect("generated rows are normalized")
}
