//! Evaluation of clausal formulas by enumerating outer second-order blocks
//! and deciding the existential residue with 2-SAT.
//!
//! Universal blocks at the end of the prefix are first removed syntactically.
//! The outer blocks are then assigned in prefix order and the assigned
//! variables become relations of the structure. The remaining existential
//! block is freed of guards by case splitting and grounded; each ground
//! disjunct is 2-CNF when the formula is Krom or existentially Krom.

use std::collections::BTreeMap;

use crate::error::Result;
use crate::eval::ground::{ground_with, GroundMode};
use crate::eval::limits::{Limits, Stats};
use crate::eval::qbf::Matrix;
use crate::eval::{sat, twosat};
use crate::logic::formula::{ClausalFormula, Clause, Literal, Quantifier};
use crate::logic::structure::{tuple_count, FiniteStructure, Relation};
use crate::transforms::guards::expand_exists_r;
use crate::transforms::universal::drop_innermost_universal;

/// `structure ⊨ formula`, with default limits.
pub fn eval_alternating(formula: &ClausalFormula, structure: &FiniteStructure) -> Result<bool> {
    eval_alternating_with(formula, structure, &Limits::default(), &mut Stats::default())
}

pub fn eval_alternating_with(
    formula: &ClausalFormula,
    structure: &FiniteStructure,
    limits: &Limits,
    stats: &mut Stats,
) -> Result<bool> {
    formula.validate()?;
    let mut f = formula.clone();
    while matches!(f.so_prefix.last(), Some(q) if q.quantifier == Quantifier::Forall) {
        f = drop_innermost_universal(&f)?;
        stats.validity_checks += 1;
    }
    let mut ctx = Ctx {
        limits,
        stats,
        fixed: BTreeMap::new(),
    };
    ctx.fo_exists(&f, structure, &|ctx, f, s| ctx.outer(f, s))
}

type Cont<'c> = dyn Fn(&mut Ctx<'_>, &ClausalFormula, &FiniteStructure) -> Result<bool> + 'c;

struct Ctx<'a> {
    limits: &'a Limits,
    stats: &'a mut Stats,
    /// Values of the first-order existential variables chosen so far.
    fixed: BTreeMap<String, usize>,
}

impl Ctx<'_> {
    /// Disjunction over the values of the not yet fixed variables of the
    /// first-order existential prefix.
    fn fo_exists(&mut self, f: &ClausalFormula, s: &FiniteStructure, k: &Cont<'_>) -> Result<bool> {
        let open: Vec<String> = f
            .fo_exists
            .iter()
            .filter(|v| !self.fixed.contains_key(*v))
            .cloned()
            .collect();
        if open.is_empty() {
            return k(self, f, s);
        }
        let n = s.size();
        let mut tuple = vec![0usize; open.len()];
        let mut result = false;
        'outer: loop {
            for (v, &e) in open.iter().zip(&tuple) {
                self.fixed.insert(v.clone(), e);
            }
            if k(self, f, s)? {
                result = true;
                break 'outer;
            }
            let mut i = open.len();
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                tuple[i] += 1;
                if tuple[i] < n {
                    break;
                }
                tuple[i] = 0;
            }
        }
        for v in &open {
            self.fixed.remove(v);
        }
        Ok(result)
    }

    /// Assigns the outermost block unless it is the last, existential one.
    fn outer(&mut self, f: &ClausalFormula, s: &FiniteStructure) -> Result<bool> {
        let blocks = f.blocks();
        let Some((q, members)) = blocks.first() else {
            return self.leaf(f, s);
        };
        if blocks.len() == 1 && *q == Quantifier::Exists {
            return self.leaf(f, s);
        }
        let vars: Vec<_> = members.iter().map(|&i| f.so_prefix[i].clone()).collect();
        let n = s.size();
        let sizes: Vec<usize> = vars.iter().map(|v| tuple_count(n, v.arity)).collect();
        let total: usize = sizes.iter().sum();
        let label = vars.iter().map(|v| v.name.as_str()).collect::<Vec<_>>().join(",");
        let count = self.limits.block_assignments(&label, total)?;
        let rest = ClausalFormula {
            so_prefix: f.so_prefix[members.len()..].to_vec(),
            ..f.clone()
        };
        let forall = *q == Quantifier::Forall;
        for m in 0..count {
            self.stats.assignments += 1;
            let mut bit = total;
            let mut frozen = s.clone();
            let mut nonempty = BTreeMap::new();
            for (v, &size) in vars.iter().zip(&sizes) {
                // lexicographic over the atom index: the first atom is the most significant bit
                let bits: Vec<bool> = (0..size)
                    .map(|_| {
                        bit -= 1;
                        (m >> bit) & 1 == 1
                    })
                    .collect();
                nonempty.insert(v.name.clone(), bits.iter().any(|&b| b));
                frozen = frozen.expand(&v.name, Relation::from_bits(v.arity, bits));
            }
            let residual = freeze_guards(&rest, &nonempty);
            let r = self.fo_exists(&residual, &frozen, &|ctx, f, s| ctx.outer(f, s))?;
            if r != forall {
                return Ok(r);
            }
        }
        Ok(forall)
    }

    /// Decides an existential residue: guards are split away, and every
    /// disjunct is grounded and handed to 2-SAT (or to general SAT when a
    /// ground clause has more than two literals).
    fn leaf(&mut self, f: &ClausalFormula, s: &FiniteStructure) -> Result<bool> {
        for d in expand_exists_r(f)? {
            if self.fo_exists(&d, s, &|ctx, d, s| ctx.ground_leaf(d, s))? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn ground_leaf(&mut self, f: &ClausalFormula, s: &FiniteStructure) -> Result<bool> {
        let fixed: BTreeMap<String, usize> = f
            .fo_exists
            .iter()
            .map(|v| (v.clone(), self.fixed[v]))
            .collect();
        let (qbf, _) = ground_with(f, s, &fixed, GroundMode::PerClause)?;
        let Matrix::Cnf(clauses) = &qbf.matrix else {
            unreachable!("grounding yields CNF")
        };
        if clauses.iter().all(|c| c.len() <= 2) {
            self.stats.twosat_calls += 1;
            Ok(twosat::eval_2sat(qbf.num_vars, clauses)?.is_some())
        } else {
            self.stats.fallback_calls += 1;
            Ok(sat::solve(qbf.num_vars, clauses).is_some())
        }
    }
}

/// Replaces guards on assigned variables by their truth values.
fn freeze_guards(f: &ClausalFormula, nonempty: &BTreeMap<String, bool>) -> ClausalFormula {
    let mut matrix = Vec::with_capacity(f.matrix.len());
    for c in &f.matrix {
        let mut lits = Vec::with_capacity(c.0.len());
        let mut satisfied = false;
        for l in &c.0 {
            match l {
                Literal::Guard(r) => match nonempty.get(r) {
                    Some(true) => satisfied = true,
                    Some(false) => {}
                    None => lits.push(l.clone()),
                },
                _ => lits.push(l.clone()),
            }
        }
        if satisfied {
            continue;
        }
        if lits.is_empty() {
            lits.push(Literal::Falsum);
        }
        matrix.push(Clause(lits));
    }
    ClausalFormula {
        matrix,
        ..f.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::ground::ground;
    use crate::eval::qbf::eval_qbf_bruteforce;
    use crate::textio::{parse_formula, parse_structure};

    fn clausal(s: &str) -> ClausalFormula {
        parse_formula(s).unwrap().as_clausal().unwrap().clone()
    }

    const NOT_SCC: &str = "exists2 R/2. exists2 Y/2. all x y z. (~E(x,y)|R(x,y)) & (~E(x,y)|~R(y,z)|R(x,z)) \
                             & (R(x,y)|Y(x,y)) & (~Y(x,y)|~R(x,y)) & (some Y)";

    #[test]
    fn not_scc_two_nodes_one_edge() {
        let s = parse_structure("domain 2\nrel E/2 = {(0,1)}").unwrap();
        let mut stats = Stats::default();
        assert!(eval_alternating_with(&clausal(NOT_SCC), &s, &Limits::default(), &mut stats).unwrap());
        assert!(!stats.used_bruteforce());
        assert!(stats.twosat_calls > 0);
    }

    #[test]
    fn pi_krom_is_false() {
        let f = clausal("forall2 X/1. all x. (X(x))");
        for n in 1..=3 {
            let s = parse_structure(&format!("domain {n}")).unwrap();
            assert!(!eval_alternating(&f, &s).unwrap());
        }
    }

    #[test]
    fn ekrom_copy() {
        let f = clausal("forall2 X/1. exists2 Y/1. all x. (~X(x) | Y(x)) & (X(x) | ~Y(x))");
        let s = parse_structure("domain 2").unwrap();
        let mut stats = Stats::default();
        assert!(eval_alternating_with(&f, &s, &Limits::default(), &mut stats).unwrap());
        assert_eq!(stats.assignments, 4);
    }

    #[test]
    fn agrees_with_bruteforce() {
        let formulas = [
            NOT_SCC,
            "forall2 X/1. exists2 Y/1. all x y. (X(x) | Y(x)) & (~Y(x) | ~E(x,y) | Y(y)) & (some X | ~Y(x))",
            "exists2 X/1. forall2 Z/1. exists2 Y/1. all x y. (X(x) | Z(x) | ~Y(y)) & (some Y) & (~X(x) | E(x,y))",
            "exists2 X/1. forall2 Z/1. all x y. (X(x) | Z(x) | ~Z(y)) & (some Z | ~Z(x) | E(x,x))",
            "forall2 X/1. exists2 Y/1. all x. (~X(x) | Y(x) | E(x,x)) & (some X | Y(x))",
            "all x. (E(x,x))",
        ];
        let structures = [
            "domain 1\nrel E/2 = {}",
            "domain 1\nrel E/2 = {(0,0)}",
            "domain 2\nrel E/2 = {(0,1)}",
            "domain 2\nrel E/2 = {(0,1),(1,0)}",
            "domain 2\nrel E/2 = {(0,0),(1,1)}",
        ];
        let limits = Limits::default();
        for src in formulas {
            let f = clausal(src);
            for st in structures {
                let s = parse_structure(st).unwrap();
                let (q, _) = ground(&f, &s).unwrap();
                let want = eval_qbf_bruteforce(&q, &limits).unwrap();
                assert_eq!(eval_alternating(&f, &s).unwrap(), want, "{src} on {st}");
            }
        }
    }

    #[test]
    fn block_limit_names_the_block() {
        let f = clausal("forall2 X/2. exists2 Y/1. all x. (Y(x))");
        let s = parse_structure("domain 5").unwrap();
        let err = eval_alternating(&f, &s).unwrap_err();
        assert!(err.is_resource());
        assert!(err.to_string().contains('X'), "{err}");
    }
}
