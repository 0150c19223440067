//! 2-SAT via strongly connected components of the implication graph.

use crate::error::{Error, Result};

#[inline]
fn node(lit: i32) -> usize {
    let v = lit.unsigned_abs() as usize - 1;
    2 * v + usize::from(lit < 0)
}

/// Decides a CNF with at most two literals per clause over variables
/// `1..=num_vars`. Returns a satisfying assignment (indexed by variable,
/// index 0 unused) or `None`.
pub fn eval_2sat(num_vars: u32, clauses: &[Vec<i32>]) -> Result<Option<Vec<bool>>> {
    let n = 2 * num_vars as usize;
    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
    for c in clauses {
        if c.iter().any(|l| *l == 0 || l.unsigned_abs() > num_vars) {
            return Err(Error::structural("literal out of range in 2-SAT input"));
        }
        match c.as_slice() {
            [] => return Ok(None),
            [a] => adj[node(-a)].push(node(*a) as u32),
            [a, b] => {
                adj[node(-a)].push(node(*b) as u32);
                adj[node(-b)].push(node(*a) as u32);
            }
            _ => {
                return Err(Error::structural(format!(
                    "2-SAT clause with {} literals",
                    c.len()
                )))
            }
        }
    }
    let comp = tarjan(&adj);
    let mut witness = vec![false; num_vars as usize + 1];
    for v in 0..num_vars as usize {
        let (pos, neg) = (comp[2 * v], comp[2 * v + 1]);
        if pos == neg {
            return Ok(None);
        }
        // components are numbered in reverse topological order
        witness[v + 1] = pos < neg;
    }
    Ok(Some(witness))
}

/// Component id per node; ids are assigned in the order components are
/// completed, which is a reverse topological order of the condensation.
pub(crate) fn tarjan(adj: &[Vec<u32>]) -> Vec<u32> {
    const UNSEEN: u32 = u32::MAX;
    let n = adj.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut call: Vec<(u32, usize)> = Vec::new();
    let (mut next_index, mut next_comp) = (0u32, 0u32);
    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root as u32, 0));
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root as u32);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            let v = v as usize;
            if let Some(&w) = adj[v].get(*edge) {
                *edge += 1;
                let w = w as usize;
                if index[w] == UNSEEN {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w as u32);
                    on_stack[w] = true;
                    call.push((w as u32, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                let p = parent as usize;
                low[p] = low[p].min(low[v]);
            }
            if low[v] == index[v] {
                loop {
                    let w = stack.pop().unwrap() as usize;
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}
