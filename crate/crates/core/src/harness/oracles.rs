//! Reference implementations used to cross-check the evaluators.

use petgraph::algo::kosaraju_scc;
use petgraph::graph::DiGraph;

use crate::error::{Error, Result};
use crate::logic::structure::FiniteStructure;

/// Whether every ordered pair of distinct elements is joined by an `E`-path.
/// A single node is strongly connected.
pub fn scc_strong_connectivity(s: &FiniteStructure, edge: &str) -> Result<bool> {
    let n = s.size();
    let e = s
        .relation(edge)
        .filter(|r| r.arity() == 2)
        .ok_or_else(|| Error::structural(format!("strong connectivity needs a binary relation `{edge}`")))?;
    let mut g = DiGraph::<(), ()>::with_capacity(n, e.len());
    let nodes: Vec<_> = (0..n).map(|_| g.add_node(())).collect();
    for t in e.tuples(n) {
        g.add_edge(nodes[t[0]], nodes[t[1]], ());
    }
    Ok(kosaraju_scc(&g).len() == 1)
}
