//! A small DPLL SAT solver (two watched literals, chronological
//! backtracking) and a Tseitin encoder for [`Circuit`]s.

use crate::eval::qbf::Circuit;

#[inline]
fn lit_index(l: i32) -> usize {
    2 * l.unsigned_abs() as usize + usize::from(l < 0)
}

struct Solver {
    clauses: Vec<Vec<i32>>,
    watches: Vec<Vec<usize>>,
    /// 0 unassigned, 1 true, -1 false; indexed by variable.
    value: Vec<i8>,
    trail: Vec<i32>,
    head: usize,
    /// (trail length before the decision, decision literal, already flipped)
    levels: Vec<(usize, i32, bool)>,
}

impl Solver {
    #[inline]
    fn lit_value(&self, l: i32) -> i8 {
        let v = self.value[l.unsigned_abs() as usize];
        if l > 0 {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, l: i32) {
        self.value[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
        self.trail.push(l);
    }

    /// Unit propagation; returns false on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let p = self.trail[self.head];
            self.head += 1;
            let false_lit = -p;
            let mut ws = std::mem::take(&mut self.watches[lit_index(false_lit)]);
            let mut i = 0;
            let mut conflict = false;
            while i < ws.len() {
                let ci = ws[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == false_lit {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_val = {
                    let v = self.value[other.unsigned_abs() as usize];
                    if other > 0 {
                        v
                    } else {
                        -v
                    }
                };
                if other_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let l = clause[k];
                    let v = self.value[l.unsigned_abs() as usize];
                    let lv = if l > 0 { v } else { -v };
                    if lv != -1 {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[lit_index(new_watch)].push(ci);
                        ws.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                if other_val == 0 {
                    self.assign(other);
                    i += 1;
                } else {
                    conflict = true;
                    break;
                }
            }
            self.watches[lit_index(false_lit)] = ws;
            if conflict {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        while self.trail.len() > len {
            let l = self.trail.pop().unwrap();
            self.value[l.unsigned_abs() as usize] = 0;
        }
        self.head = len;
    }
}

/// Finds a satisfying assignment of the CNF over variables `1..=num_vars`
/// (indexed by variable, index 0 unused), or `None` if there is none.
pub fn solve(num_vars: u32, clauses: &[Vec<i32>]) -> Option<Vec<bool>> {
    let nv = num_vars as usize;
    let mut solver = Solver {
        clauses: Vec::with_capacity(clauses.len()),
        watches: vec![Vec::new(); 2 * nv + 2],
        value: vec![0; nv + 1],
        trail: Vec::new(),
        head: 0,
        levels: Vec::new(),
    };
    let mut units = Vec::new();
    for c in clauses {
        let mut c = c.clone();
        c.sort_unstable_by_key(|l| (l.unsigned_abs(), *l < 0));
        c.dedup();
        if c.windows(2).any(|w| w[0] == -w[1]) {
            continue;
        }
        match c.len() {
            0 => return None,
            1 => units.push(c[0]),
            _ => {
                let ci = solver.clauses.len();
                solver.watches[lit_index(c[0])].push(ci);
                solver.watches[lit_index(c[1])].push(ci);
                solver.clauses.push(c);
            }
        }
    }
    for u in units {
        match solver.lit_value(u) {
            1 => {}
            -1 => return None,
            _ => solver.assign(u),
        }
    }
    let mut next_var = 1usize;
    loop {
        if !solver.propagate() {
            loop {
                let (len, lit, flipped) = solver.levels.pop()?;
                solver.undo_to(len);
                if !flipped {
                    solver.levels.push((len, -lit, true));
                    solver.assign(-lit);
                    break;
                }
            }
            next_var = 1;
            continue;
        }
        while next_var <= nv && solver.value[next_var] != 0 {
            next_var += 1;
        }
        if next_var > nv {
            let mut out = vec![false; nv + 1];
            for v in 1..=nv {
                out[v] = solver.value[v] == 1;
            }
            return Some(out);
        }
        let decision = -(next_var as i32);
        solver.levels.push((solver.trail.len(), decision, false));
        solver.assign(decision);
    }
}

/// Tseitin encoding of `circuit` over variables `1..=num_vars`. Returns the
/// clauses and the new variable count (auxiliary variables follow the
/// originals). The CNF is satisfiable iff the circuit is, with the same
/// values on the original variables.
pub fn tseitin(circuit: &Circuit, num_vars: u32) -> (Vec<Vec<i32>>, u32) {
    let mut next = num_vars;
    let mut clauses = Vec::new();
    match circuit {
        Circuit::Const(true) => {}
        Circuit::Const(false) => clauses.push(Vec::new()),
        Circuit::And(items) => {
            for it in items {
                let l = encode_clause(it, &mut next, &mut clauses);
                clauses.push(l);
            }
        }
        other => {
            let l = encode_clause(other, &mut next, &mut clauses);
            clauses.push(l);
        }
    }
    (clauses, next)
}

/// Literals whose disjunction is equivalent to `c` (given the side clauses).
fn encode_clause(c: &Circuit, next: &mut u32, out: &mut Vec<Vec<i32>>) -> Vec<i32> {
    match c {
        Circuit::Or(items) => items.iter().map(|i| encode_lit(i, next, out)).collect(),
        other => vec![encode_lit(other, next, out)],
    }
}

/// A literal that implies `c` (one-sided encoding suffices for satisfiability).
fn encode_lit(c: &Circuit, next: &mut u32, out: &mut Vec<Vec<i32>>) -> i32 {
    match c {
        Circuit::Lit(l) => *l,
        Circuit::Const(b) => {
            *next += 1;
            let v = *next as i32;
            out.push(vec![if *b { v } else { -v }]);
            v
        }
        Circuit::And(items) => {
            *next += 1;
            let v = *next as i32;
            for it in items {
                let l = encode_lit(it, next, out);
                out.push(vec![-v, l]);
            }
            v
        }
        Circuit::Or(items) => {
            *next += 1;
            let v = *next as i32;
            let mut clause = vec![-v];
            for it in items {
                clause.push(encode_lit(it, next, out));
            }
            out.push(clause);
            v
        }
    }
}
