use crate::error::{Error, Result};
use crate::logic::formula::{ClausalFormula, Clause, Literal, Term};

/// What an atom `R z̄` is replaced with.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Replacement {
    /// `R z̄ ↦ ⊤` or `R z̄ ↦ ⊥`. The quantifier on `R` is dropped.
    Truth(bool),
    /// `R z̄ ↦ (z̄ = ȳ) ∨ R z̄`, which agrees with `R` except at the point `ȳ`.
    AddPoint(Vec<Term>),
}

/// Replaces every atom and guard over `target` in `formula`, then normalizes
/// the matrix: clauses that became true are dropped, `⊥` literals removed,
/// emptied clauses become `(false)` and tuple equalities are distributed.
pub fn substitute(
    formula: &ClausalFormula,
    target: &str,
    replacement: &Replacement,
) -> Result<ClausalFormula> {
    let arity = formula
        .so_var(target)
        .map(|q| q.arity)
        .or_else(|| {
            formula.matrix.iter().flat_map(|c| &c.0).find_map(|l| match l {
                Literal::Atom { pred, args, .. } if pred == target => Some(args.len()),
                _ => None,
            })
        });
    if let (Replacement::AddPoint(point), Some(a)) = (replacement, arity) {
        if point.len() != a {
            return Err(Error::structural(format!(
                "`{target}` has arity {a} but the replacement point has {} coordinates",
                point.len()
            )));
        }
    }
    let mut matrix = Vec::with_capacity(formula.matrix.len());
    for clause in &formula.matrix {
        for c in substitute_clause(clause, target, replacement) {
            matrix.extend(c.normalize());
        }
    }
    let so_prefix = match replacement {
        Replacement::Truth(_) => formula
            .so_prefix
            .iter()
            .filter(|q| q.name != target)
            .cloned()
            .collect(),
        Replacement::AddPoint(_) => formula.so_prefix.clone(),
    };
    Ok(ClausalFormula {
        fo_exists: formula.fo_exists.clone(),
        so_prefix,
        fo_universal: formula.fo_universal.clone(),
        matrix,
    })
}

/// Substitution on one clause, before normalization. The result is a
/// conjunction because a negated `AddPoint` replacement is a conjunction.
pub(crate) fn substitute_clause(
    clause: &Clause,
    target: &str,
    replacement: &Replacement,
) -> Vec<Clause> {
    let mut out: Vec<Vec<Literal>> = vec![Vec::new()];
    for lit in &clause.0 {
        let alternatives: Vec<Vec<Literal>> = match (lit, replacement) {
            (Literal::Atom { pred, positive, .. }, Replacement::Truth(v)) if pred == target => {
                if *v == *positive {
                    return Vec::new();
                }
                vec![vec![]]
            }
            (Literal::Guard(r), Replacement::Truth(v)) if r == target => {
                if *v {
                    // ⊤ has a nonempty extension on any nonempty domain
                    return Vec::new();
                }
                vec![vec![]]
            }
            (Literal::Guard(r), Replacement::AddPoint(_)) if r == target => return Vec::new(),
            (
                Literal::Atom {
                    pred,
                    args,
                    positive: true,
                },
                Replacement::AddPoint(point),
            ) if pred == target => vec![vec![
                Literal::Eq {
                    left: args.clone(),
                    right: point.clone(),
                    positive: true,
                },
                lit.clone(),
            ]],
            (
                Literal::Atom {
                    pred,
                    args,
                    positive: false,
                },
                Replacement::AddPoint(point),
            ) if pred == target => vec![
                vec![Literal::Eq {
                    left: args.clone(),
                    right: point.clone(),
                    positive: false,
                }],
                vec![lit.clone()],
            ],
            _ => vec![vec![lit.clone()]],
        };
        let mut next = Vec::with_capacity(out.len() * alternatives.len());
        for base in &out {
            for alt in &alternatives {
                let mut c = base.clone();
                c.extend(alt.iter().cloned());
                next.push(c);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(|lits| {
            if lits.is_empty() {
                Clause::falsum()
            } else {
                Clause(lits)
            }
        })
        .collect()
}
