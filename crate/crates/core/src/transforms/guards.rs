//! Elimination of guards `some R` from existential formulas by case
//! splitting on whether `R` is empty.

use crate::error::{Error, Result};
use crate::logic::formula::{ClausalFormula, Literal, Quantifier, Term};
use crate::logic::fresh::FreshNames;
use crate::logic::substitute::{substitute, Replacement};
use crate::transforms::trace::RewriteTrace;

/// Rewrites an existential formula with guards into a disjunction of
/// guard-free formulas under first-order existential prefixes.
///
/// For each guarded variable `R`, in prefix order, every disjunct `φ` is
/// split into `φ[R/⊥]` and `∃ȳ φ[R z̄ / (z̄ = ȳ) ∨ R z̄]` with fresh `ȳ`. In
/// the second branch the guard holds at `ȳ`, so its clauses disappear.
pub fn expand_exists_r(formula: &ClausalFormula) -> Result<Vec<ClausalFormula>> {
    expand_exists_r_traced(formula).map(|(d, _)| d)
}

pub fn expand_exists_r_traced(
    formula: &ClausalFormula,
) -> Result<(Vec<ClausalFormula>, RewriteTrace)> {
    if formula
        .so_prefix
        .iter()
        .any(|q| q.quantifier != Quantifier::Exists)
    {
        return Err(Error::precondition(
            "guard expansion needs a purely existential second-order prefix",
        ));
    }
    for lit in formula.matrix.iter().flat_map(|c| &c.0) {
        if let Literal::Guard(r) = lit {
            if !formula.is_so_var(r) {
                return Err(Error::precondition(format!(
                    "guard on `{r}`, which is not quantified"
                )));
            }
        }
    }
    let mut fresh = FreshNames::new(formula.names());
    let mut trace = RewriteTrace::default();
    let mut disjuncts = vec![formula.clone()];
    for q in &formula.so_prefix {
        let guarded = |f: &ClausalFormula| {
            f.matrix
                .iter()
                .flat_map(|c| &c.0)
                .any(|l| matches!(l, Literal::Guard(r) if *r == q.name))
        };
        let mut next = Vec::with_capacity(disjuncts.len() * 2);
        for d in disjuncts {
            if !guarded(&d) {
                next.push(d);
                continue;
            }
            let empty = substitute(&d, &q.name, &Replacement::Truth(false))?;
            let point = fresh.fresh_many("y", q.arity);
            let mut inhabited = substitute(
                &d,
                &q.name,
                &Replacement::AddPoint(point.iter().map(Term::var).collect()),
            )?;
            inhabited.fo_exists.extend(point.iter().cloned());
            trace.push("empty", &q.name, &d, &empty);
            trace.push("inhabited", &q.name, &d, &inhabited);
            next.push(empty);
            next.push(inhabited);
        }
        disjuncts = next;
    }
    Ok((disjuncts, trace))
}
