//! Shared test oracles, all independent of the implementation paths they
//! check: class enumeration drives the essential-graph oracle, and full
//! DAG enumeration drives the exact-posterior oracle.

use bnsearch::{enumerate_class, for_each_dag, Arc, Cpdag, Dag};

pub fn all_dags(n: usize) -> Vec<Dag> {
    let mut out = Vec::new();
    for_each_dag(n, |g| out.push(g.clone())).unwrap();
    out
}

/// Essential graph by brute force: a pair is directed iff every member of
/// the covered-reversal closure orients it the same way.
pub fn cpdag_by_enumeration(g: &Dag) -> Cpdag {
    let members = enumerate_class(g).unwrap();
    let mut out = Cpdag::new(g.n());
    for (u, v) in g.skeleton() {
        let forward = members.iter().filter(|m| m.has_arc(Arc::new(u, v))).count();
        if forward == members.len() {
            out.set_directed(u, v);
        } else if forward == 0 {
            out.set_directed(v, u);
        } else {
            out.set_undirected(u, v);
        }
    }
    out
}
