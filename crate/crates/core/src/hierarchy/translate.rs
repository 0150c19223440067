//! Translation of prenex second-order formulas into Krom formulas with
//! guards: `Θ ∨ ∀x∀y(x = y ∧ δ(x))`.

use std::collections::BTreeSet;

use crate::error::Result;
use crate::eval::check::check_model;
use crate::harness::enumerate::enumerate_structures;
use crate::hierarchy::intermediate::{negate_and_skolemize, Intermediate};
use crate::hierarchy::interpret::{apply_interpretation, build_interpretation, interpreted_expr, Interpretation};
use crate::hierarchy::qbf::phi_formula_with;
use crate::hierarchy::qfnorm;
use crate::logic::formula::{ClausalFormula, Clause, Expr, Literal, SoFormula, Term};
use crate::logic::fresh::FreshNames;
use crate::logic::vocab::Vocabulary;

/// `δ(x)`: one conjunction of literals per isomorphism type of a one-element
/// structure satisfying the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OneElementDisjunct {
    pub var: String,
    pub types: Vec<Vec<Literal>>,
}

impl OneElementDisjunct {
    pub fn to_expr(&self) -> Expr {
        Expr::or(
            self.types
                .iter()
                .map(|t| Expr::and(t.iter().map(Expr::from_literal).collect()))
                .collect(),
        )
    }
}

/// Literals describing the one-element structure in which exactly the
/// relations of `true_rels` hold.
fn isomorphism_type(sigma: &Vocabulary, x: &str, true_rels: &BTreeSet<String>) -> Vec<Literal> {
    let mut lits: Vec<Literal> = sigma
        .constants()
        .iter()
        .filter(|c| !sigma.is_builtin(c))
        .map(|c| Literal::eq(Term::constant(c), Term::var(x), true))
        .collect();
    for (r, a) in sigma.relations() {
        if sigma.is_builtin(r) {
            continue;
        }
        lits.push(Literal::atom(r.clone(), vec![Term::var(x); *a], true_rels.contains(r)));
    }
    lits
}

/// Computes `δ` by checking the source on every one-element structure.
pub fn one_element_delta(source: &SoFormula, sigma: &Vocabulary, x: &str) -> Result<OneElementDisjunct> {
    let mut types = Vec::new();
    for s in enumerate_structures(sigma, 1, u128::MAX)? {
        if check_model(source, &s)? {
            let true_rels = s
                .relations()
                .iter()
                .filter(|(_, r)| !r.is_empty())
                .map(|(name, _)| name.clone())
                .collect();
            types.push(isomorphism_type(sigma, x, &true_rels));
        }
    }
    Ok(OneElementDisjunct {
        var: x.to_string(),
        types,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Translation {
    /// `Θ` and the one-element formula as a two-disjunct formula.
    pub output: SoFormula,
    /// `Θ` before normalization.
    pub theta: Expr,
    pub intermediate: Intermediate,
    pub interpretation: Interpretation,
    pub delta: OneElementDisjunct,
}

impl Translation {
    pub fn theta_clausal(&self) -> &ClausalFormula {
        match &self.output {
            SoFormula::Disjunction(ds) => &ds[0],
            _ => unreachable!("translations are disjunctions"),
        }
    }
}

/// Translates `Q₁X₁ ⋯ ∀X_k φ` (one second-order variable per block, the
/// last block universal, `φ` first-order) into an equivalent formula whose
/// first disjunct is Krom with guards and `k + 1` blocks, and whose second
/// handles one-element structures.
pub fn translate_sigma_k(source: &SoFormula) -> Result<Translation> {
    let intermediate = negate_and_skolemize(source)?;
    let interpretation = build_interpretation(&intermediate)?;
    let sigma = intermediate.sigma.clone();
    let mut used: BTreeSet<String> = source.names();
    used.extend(sigma.constants().iter().cloned());
    used.extend(sigma.relations().iter().map(|(r, _)| r.clone()));
    let psi = phi_formula_with(intermediate.k(), intermediate.prefix[0].quantifier);
    let theta = interpreted_expr(&psi, &interpretation, &used)?;
    let theta_clausal = apply_interpretation(&psi, &interpretation, &used)?;

    let mut fresh = FreshNames::new(used.iter().cloned());
    let (x, y) = (fresh.claim("x"), fresh.claim("y"));
    let delta = one_element_delta(source, &sigma, &x)?;
    let mut matrix = vec![Clause(vec![Literal::eq(Term::var(&x), Term::var(&y), true)])];
    matrix.extend(qfnorm::cnf(&delta.to_expr())?);
    let small = ClausalFormula::new(Vec::new(), vec![x, y], matrix);
    Ok(Translation {
        output: SoFormula::Disjunction(vec![theta_clausal, small]),
        theta,
        intermediate,
        interpretation,
        delta,
    })
}
