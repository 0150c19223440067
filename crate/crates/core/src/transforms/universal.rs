//! Elimination of an innermost universal second-order block.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::logic::formula::{ClausalFormula, Clause, Literal, Quantifier};
use crate::transforms::trace::RewriteTrace;

/// Removes the innermost second-order block, which must be universal.
///
/// Each clause is rewritten on its own, since `∀X̄∀x̄` distributes over the
/// conjunction:
/// * a negative literal `¬X t̄` together with `some X` makes the clause a
///   tautology, so it is removed;
/// * otherwise every pair `X t̄₁`, `¬X t̄₂` contributes `t̄₁ = t̄₂` (one pair is
///   the usual Krom case `α ∨ X t̄₁ ∨ ¬X t̄₂ ↦ α ∨ t̄₁ = t̄₂`);
/// * the remaining literals over the block are deleted, since some valuation
///   falsifies all of them.
///
/// Variables of the outer blocks are left alone and behave like vocabulary
/// symbols.
pub fn drop_innermost_universal(formula: &ClausalFormula) -> Result<ClausalFormula> {
    drop_innermost_universal_traced(formula).map(|(f, _)| f)
}

pub fn drop_innermost_universal_traced(
    formula: &ClausalFormula,
) -> Result<(ClausalFormula, RewriteTrace)> {
    let blocks = formula.blocks();
    let Some((Quantifier::Forall, members)) = blocks.last() else {
        return Err(Error::precondition(
            "innermost second-order block is not universal",
        ));
    };
    let block: BTreeSet<&str> = members
        .iter()
        .map(|&i| formula.so_prefix[i].name.as_str())
        .collect();
    let mut trace = RewriteTrace::default();
    let mut matrix = Vec::with_capacity(formula.matrix.len());
    for (ci, clause) in formula.matrix.iter().enumerate() {
        let in_block = |l: &Literal| l.relation().is_some_and(|r| block.contains(r));
        if !clause.0.iter().any(in_block) {
            matrix.push(clause.clone());
            continue;
        }
        let (rule, out) = rewrite_clause(clause, &block);
        let out: Vec<Clause> = out.iter().flat_map(Clause::normalize).collect();
        trace.push(rule, format!("clause {}", ci + 1), clause, show(&out));
        matrix.extend(out);
    }
    let keep = members.len();
    let so_prefix = formula.so_prefix[..formula.so_prefix.len() - keep].to_vec();
    Ok((
        ClausalFormula {
            fo_exists: formula.fo_exists.clone(),
            so_prefix,
            fo_universal: formula.fo_universal.clone(),
            matrix,
        },
        trace,
    ))
}

fn rewrite_clause(clause: &Clause, block: &BTreeSet<&str>) -> (&'static str, Vec<Clause>) {
    let lits = &clause.0;
    let negated = |x: &str| {
        lits.iter().any(|l| {
            matches!(l, Literal::Atom { pred, positive: false, .. } if pred == x)
        })
    };
    let tautology = lits
        .iter()
        .any(|l| matches!(l, Literal::Guard(x) if block.contains(x.as_str()) && negated(x)));
    if tautology {
        return ("case1", Vec::new());
    }
    let mut rest: Vec<Literal> = lits
        .iter()
        .filter(|l| !l.relation().is_some_and(|r| block.contains(r)))
        .cloned()
        .collect();
    let mut pairs = Vec::new();
    for p in lits {
        let Literal::Atom { pred, args: a1, positive: true } = p else {
            continue;
        };
        if !block.contains(pred.as_str()) {
            continue;
        }
        for n in lits {
            if let Literal::Atom { pred: q, args: a2, positive: false } = n {
                if q == pred {
                    pairs.push(Literal::Eq {
                        left: a1.clone(),
                        right: a2.clone(),
                        positive: true,
                    });
                }
            }
        }
    }
    let rule = if pairs.is_empty() { "case3" } else { "case2" };
    rest.extend(pairs);
    if rest.is_empty() {
        rest.push(Literal::Falsum);
    }
    (rule, vec![Clause(rest)])
}

fn show(clauses: &[Clause]) -> String {
    if clauses.is_empty() {
        return "true".into();
    }
    clauses
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(" & ")
}

/// Removes innermost universal blocks until the innermost block is
/// existential or the prefix is empty.
pub fn strip_universal_blocks(formula: &ClausalFormula) -> Result<ClausalFormula> {
    strip_universal_blocks_traced(formula).map(|(f, _)| f)
}

pub fn strip_universal_blocks_traced(
    formula: &ClausalFormula,
) -> Result<(ClausalFormula, RewriteTrace)> {
    let mut cur = formula.clone();
    let mut trace = RewriteTrace::default();
    while matches!(cur.so_prefix.last(), Some(q) if q.quantifier == Quantifier::Forall) {
        let (next, t) = drop_innermost_universal_traced(&cur)?;
        trace.extend(t);
        cur = next;
    }
    Ok((cur, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::classify::{classify, FragmentTag};
    use crate::logic::formula::SoFormula;
    use crate::textio::parse_formula;

    fn clausal(s: &str) -> ClausalFormula {
        parse_formula(s).unwrap().as_clausal().unwrap().clone()
    }

    fn tag(f: &ClausalFormula) -> FragmentTag {
        classify(&SoFormula::Clausal(f.clone())).unwrap()
    }

    #[test]
    fn case1_removes_clause() {
        let f = clausal("forall2 X/1. all x. (P(x) | ~X(x) | some X)");
        let g = drop_innermost_universal(&f).unwrap();
        assert!(g.is_trivially_true());
        assert!(g.so_prefix.is_empty());
    }

    #[test]
    fn case2_adds_equality() {
        let f = clausal("forall2 X/1. all x y. (P(x,y) | X(x) | ~X(y))");
        let (g, trace) = drop_innermost_universal_traced(&f).unwrap();
        assert_eq!(g.to_string(), clausal("all x y. (P(x,y) | x = y)").to_string());
        assert_eq!(tag(&g), FragmentTag::FoUniversalCnf);
        assert_eq!(trace.steps[0].rule, "case2");
    }

    #[test]
    fn case3_deletes_literals() {
        let f = clausal("forall2 X/1. all x. (P(x) | X(x))");
        assert_eq!(
            drop_innermost_universal(&f).unwrap().to_string(),
            clausal("all x. (P(x))").to_string()
        );
        let f = clausal("forall2 X/1. all x. (X(x))");
        assert_eq!(drop_innermost_universal(&f).unwrap().matrix, vec![Clause::falsum()]);
    }

    #[test]
    fn outer_blocks_survive() {
        let f = clausal("exists2 R/1. forall2 X/1. all x. (R(x) | X(x)) & (some R | ~X(x))");
        let g = drop_innermost_universal(&f).unwrap();
        assert_eq!(g.to_string(), clausal("exists2 R/1. all x. (R(x)) & (some R)").to_string());
        assert!(drop_innermost_universal(&g).is_err());
    }

    #[test]
    fn strip_is_a_fixpoint_on_existential_prefixes() {
        let f = clausal("exists2 R/1. forall2 X/1. exists2 Y/1. forall2 Z/1. all x. (R(x) | Z(x)) & (Y(x) | ~X(x))");
        let g = strip_universal_blocks(&f).unwrap();
        assert_eq!(g.so_prefix.len(), 3);
        assert_eq!(strip_universal_blocks(&g).unwrap(), g);
        let h = clausal("forall2 X/1. forall2 Y/1. all x. (X(x) | ~Y(x))");
        assert_eq!(tag(&strip_universal_blocks(&h).unwrap()), FragmentTag::FoUniversalCnf);
    }
}
