//! Second-order Skolemization of prenex first-order formulas.
//!
//! `∀x̄₁∃ȳ₁ ⋯ ∀x̄ₙ∃ȳₙ (C₁ ∧ ⋯ ∧ C_m)` becomes `∃Y (φ₁ ∧ φ₂ ∧ φ₃)` where `Y`
//! relates `x̄₁⋯x̄ₙ` to `ȳ₁⋯ȳₙ`:
//! * `φ₁ = ∀x̄ ∃ȳ Y x̄ȳ` (totality),
//! * `φ₂ = ∀x̄ȳx̄′ȳ′ (Y x̄ȳ ∧ Y x̄′ȳ′ → ⋀ᵢ (⋀_{j≤i} x̄ⱼ = x̄′ⱼ → ȳᵢ = ȳ′ᵢ))`
//!   (ȳᵢ depends only on x̄₁…x̄ᵢ),
//! * `φ₃ = ∀x̄ȳ (Y x̄ȳ → C₁ ∧ ⋯ ∧ C_m)`.

use crate::error::Result;
use crate::logic::formula::{Clause, Expr, Literal, Quantifier, Term};
use crate::logic::fresh::FreshNames;
use crate::transforms::prenex::{cnf_expr, PrenexFo};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemForm {
    /// Name of the Skolem relation `Y`.
    pub relation: String,
    /// `x̄₁ … x̄ₙ` (possibly empty blocks).
    pub x_blocks: Vec<Vec<String>>,
    /// `ȳ₁ … ȳₙ`, aligned with `x_blocks`.
    pub y_blocks: Vec<Vec<String>>,
    pub matrix: Vec<Clause>,
    x_primed: Vec<Vec<String>>,
    y_primed: Vec<Vec<String>>,
    /// Bound by `∃` in `φ₁`.
    y_witness: Vec<String>,
}

/// The Skolem form as `∃Y ∀ū (∃ȳ Y z̄ȳ ∧ C′₁ ∧ ⋯ ∧ C′_m′)`: `z̄` is `x̄₁⋯x̄ₙ`,
/// and the clauses are the CNF of `φ₂` and `φ₃`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalSkolem {
    pub relation: String,
    pub arity: usize,
    pub universal: Vec<String>,
    pub z: Vec<String>,
    pub y: Vec<String>,
    pub clauses: Vec<Clause>,
}

impl SkolemForm {
    pub fn xs(&self) -> Vec<String> {
        self.x_blocks.concat()
    }

    pub fn ys(&self) -> Vec<String> {
        self.y_blocks.concat()
    }

    pub fn arity(&self) -> usize {
        self.xs().len() + self.ys().len()
    }

    fn y_atom(&self, xs: &[String], ys: &[String]) -> Expr {
        Expr::atom(
            self.relation.clone(),
            xs.iter().chain(ys).map(Term::var).collect(),
        )
    }

    pub fn phi1(&self) -> Expr {
        Expr::forall(
            self.xs(),
            Expr::exists(self.y_witness.clone(), self.y_atom(&self.xs(), &self.y_witness)),
        )
    }

    pub fn phi2(&self) -> Expr {
        let (xp, yp) = (self.x_primed.concat(), self.y_primed.concat());
        let mut vars = self.xs();
        vars.extend(self.ys());
        vars.extend(xp.iter().cloned());
        vars.extend(yp.iter().cloned());
        let mut conclusions = Vec::new();
        for i in 0..self.x_blocks.len() {
            let agree: Vec<Expr> = (0..=i)
                .flat_map(|j| {
                    self.x_blocks[j]
                        .iter()
                        .zip(&self.x_primed[j])
                        .map(|(a, b)| Expr::eq(Term::var(a), Term::var(b)))
                })
                .collect();
            let same: Vec<Expr> = self.y_blocks[i]
                .iter()
                .zip(&self.y_primed[i])
                .map(|(a, b)| Expr::eq(Term::var(a), Term::var(b)))
                .collect();
            conclusions.push(Expr::implies(Expr::and(agree), Expr::and(same)));
        }
        Expr::forall(
            vars,
            Expr::implies(
                Expr::and(vec![self.y_atom(&self.xs(), &self.ys()), self.y_atom(&xp, &yp)]),
                Expr::and(conclusions),
            ),
        )
    }

    pub fn phi3(&self) -> Expr {
        let mut vars = Vec::new();
        for (x, y) in self.x_blocks.iter().zip(&self.y_blocks) {
            vars.extend(x.iter().cloned());
            vars.extend(y.iter().cloned());
        }
        Expr::forall(
            vars,
            Expr::implies(self.y_atom(&self.xs(), &self.ys()), cnf_expr(&self.matrix)),
        )
    }

    /// `∃Y (φ₁ ∧ φ₂ ∧ φ₃)`.
    pub fn to_expr(&self) -> Expr {
        Expr::so(
            Quantifier::Exists,
            self.relation.clone(),
            self.arity(),
            Expr::And(vec![self.phi1(), self.phi2(), self.phi3()]),
        )
    }

    /// The clausal variant with a single universal block.
    pub fn universal_form(&self) -> UniversalSkolem {
        let (xs, ys) = (self.xs(), self.ys());
        let (xp, yp) = (self.x_primed.concat(), self.y_primed.concat());
        let atom = |xs: &[String], ys: &[String], positive: bool| {
            Literal::atom(
                self.relation.clone(),
                xs.iter().chain(ys).map(Term::var).collect(),
                positive,
            )
        };
        let mut clauses = Vec::new();
        for i in 0..self.x_blocks.len() {
            for (a, b) in self.y_blocks[i].iter().zip(&self.y_primed[i]) {
                let mut lits = vec![atom(&xs, &ys, false), atom(&xp, &yp, false)];
                for j in 0..=i {
                    for (u, v) in self.x_blocks[j].iter().zip(&self.x_primed[j]) {
                        lits.push(Literal::eq(Term::var(u), Term::var(v), false));
                    }
                }
                lits.push(Literal::eq(Term::var(a), Term::var(b), true));
                clauses.push(Clause(lits));
            }
        }
        for c in &self.matrix {
            let mut lits = vec![atom(&xs, &ys, false)];
            lits.extend(c.0.iter().cloned());
            clauses.extend(Clause(lits).normalize());
        }
        let mut universal = xs.clone();
        universal.extend(ys.iter().cloned());
        universal.extend(xp);
        universal.extend(yp);
        UniversalSkolem {
            relation: self.relation.clone(),
            arity: self.arity(),
            universal,
            z: xs,
            y: self.y_witness.clone(),
            clauses,
        }
    }
}

/// Skolemizes `p` with a relation named `Y` (or a fresh variant of it).
pub fn skolemize_fo(p: &PrenexFo) -> Result<SkolemForm> {
    skolemize_fo_named(p, "Y")
}

/// Skolemizes `p`, naming the relation `relation` unless that clashes with a
/// symbol of `p`.
pub fn skolemize_fo_named(p: &PrenexFo, relation: &str) -> Result<SkolemForm> {
    let mut used = p.to_expr().names();
    used.extend(p.variables());
    let mut fresh = FreshNames::new(used.iter().cloned());
    let relation = if used.contains(relation) {
        fresh.fresh(relation)
    } else {
        fresh.reserve(relation);
        relation.to_string()
    };
    let (mut x_blocks, mut y_blocks): (Vec<Vec<String>>, Vec<Vec<String>>) = (Vec::new(), Vec::new());
    for (q, vars) in &p.prefix {
        match q {
            Quantifier::Forall => {
                x_blocks.push(vars.clone());
                y_blocks.push(Vec::new());
            }
            Quantifier::Exists => {
                if y_blocks.is_empty() {
                    x_blocks.push(Vec::new());
                    y_blocks.push(Vec::new());
                }
                y_blocks.last_mut().unwrap().extend(vars.iter().cloned());
            }
        }
    }
    let prime = |fresh: &mut FreshNames, blocks: &Vec<Vec<String>>| -> Vec<Vec<String>> {
        blocks
            .iter()
            .map(|b| b.iter().map(|v| fresh.fresh(v)).collect())
            .collect()
    };
    let x_primed = prime(&mut fresh, &x_blocks);
    let y_primed = prime(&mut fresh, &y_blocks);
    let y_witness = y_blocks.concat().iter().map(|v| fresh.fresh(v)).collect();
    Ok(SkolemForm {
        relation,
        x_blocks,
        y_blocks,
        matrix: p.matrix.clone(),
        x_primed,
        y_primed,
        y_witness,
    })
}
