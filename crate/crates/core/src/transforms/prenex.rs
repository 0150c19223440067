//! Prenex conjunctive normal form for first-order formulas.
//!
//! The input is put in negation normal form, bound variables are renamed
//! apart, and quantifiers are pulled out left to right (sound because no
//! bound variable occurs free elsewhere). The quantifier-free matrix is
//! converted to CNF by distribution.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::formula::{Clause, Expr, Literal, Quantifier, Term};
use crate::logic::fresh::FreshNames;

/// Upper bound on the clauses produced by a single CNF conversion.
pub const MAX_CNF_CLAUSES: usize = 1 << 20;

/// `Q₁x̄₁ ⋯ Q_n x̄_n (C₁ ∧ ⋯ ∧ C_m)` with nonempty, alternating blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrenexFo {
    pub prefix: Vec<(Quantifier, Vec<String>)>,
    pub matrix: Vec<Clause>,
}

impl PrenexFo {
    pub fn to_expr(&self) -> Expr {
        let mut body = cnf_expr(&self.matrix);
        for (q, vars) in self.prefix.iter().rev() {
            body = match q {
                Quantifier::Forall => Expr::forall(vars.clone(), body),
                Quantifier::Exists => Expr::exists(vars.clone(), body),
            };
        }
        body
    }

    pub fn variables(&self) -> Vec<String> {
        self.prefix.iter().flat_map(|(_, v)| v.iter().cloned()).collect()
    }
}

/// The expression of a CNF matrix.
pub fn cnf_expr(matrix: &[Clause]) -> Expr {
    Expr::and(
        matrix
            .iter()
            .map(|c| Expr::or(c.0.iter().map(Expr::from_literal).collect()))
            .collect(),
    )
}

/// Prenex CNF of a first-order sentence (relation symbols and constants
/// only; no second-order quantifiers or guards).
pub fn prenex_cnf(e: &Expr) -> Result<PrenexFo> {
    if e.has_so_quantifier() {
        return Err(Error::precondition("prenex normal form needs a first-order formula"));
    }
    if let Some(v) = e.free_vars().into_iter().next() {
        return Err(Error::precondition(format!("free variable `{v}`")));
    }
    let mut fresh = FreshNames::new(e.names());
    let mut seen = BTreeSet::new();
    let renamed = rename_apart(&e.nnf(), &BTreeMap::new(), &mut seen, &mut fresh);
    let mut flat: Vec<(Quantifier, String)> = Vec::new();
    let body = pull(&renamed, &mut flat);
    let mut prefix: Vec<(Quantifier, Vec<String>)> = Vec::new();
    for (q, v) in flat {
        match prefix.last_mut() {
            Some((last, vs)) if *last == q => vs.push(v),
            _ => prefix.push((q, vec![v])),
        }
    }
    Ok(PrenexFo {
        prefix,
        matrix: cnf(&body)?,
    })
}

fn rename_apart(
    e: &Expr,
    map: &BTreeMap<String, Term>,
    seen: &mut BTreeSet<String>,
    fresh: &mut FreshNames,
) -> Expr {
    match e {
        Expr::Forall(vars, body) | Expr::Exists(vars, body) => {
            let mut inner = map.clone();
            let mut new_vars = Vec::with_capacity(vars.len());
            for v in vars {
                let name = if seen.insert(v.clone()) {
                    v.clone()
                } else {
                    fresh.fresh(v)
                };
                seen.insert(name.clone());
                inner.insert(v.clone(), Term::var(name.clone()));
                new_vars.push(name);
            }
            let b = rename_apart(body, &inner, seen, fresh);
            if matches!(e, Expr::Forall(..)) {
                Expr::forall(new_vars, b)
            } else {
                Expr::exists(new_vars, b)
            }
        }
        Expr::Not(inner) => Expr::not(rename_apart(inner, map, seen, fresh)),
        Expr::And(items) => Expr::And(items.iter().map(|i| rename_apart(i, map, seen, fresh)).collect()),
        Expr::Or(items) => Expr::Or(items.iter().map(|i| rename_apart(i, map, seen, fresh)).collect()),
        other => other.rename_free(map),
    }
}

fn pull(e: &Expr, out: &mut Vec<(Quantifier, String)>) -> Expr {
    match e {
        Expr::Forall(vars, body) | Expr::Exists(vars, body) => {
            let q = if matches!(e, Expr::Forall(..)) {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            out.extend(vars.iter().map(|v| (q, v.clone())));
            pull(body, out)
        }
        Expr::And(items) => Expr::And(items.iter().map(|i| pull(i, out)).collect()),
        Expr::Or(items) => Expr::Or(items.iter().map(|i| pull(i, out)).collect()),
        other => other.clone(),
    }
}

/// CNF of a quantifier-free formula by distribution, with tautologous
/// clauses dropped and duplicate literals merged.
pub fn cnf(e: &Expr) -> Result<Vec<Clause>> {
    let raw = cnf_nnf(&e.nnf())?;
    let mut out: Vec<Clause> = Vec::with_capacity(raw.len());
    for lits in raw {
        for c in Clause(lits).normalize() {
            if !is_tautology(&c) && !out.contains(&c) {
                out.push(c);
            }
        }
    }
    if out.iter().any(Clause::is_falsum) {
        return Ok(vec![Clause::falsum()]);
    }
    Ok(out)
}

fn is_tautology(c: &Clause) -> bool {
    c.0.iter()
        .any(|l| l.negated().is_some_and(|n| c.0.contains(&n)))
}

fn cnf_nnf(e: &Expr) -> Result<Vec<Vec<Literal>>> {
    Ok(match e {
        Expr::True => Vec::new(),
        Expr::False => vec![Vec::new()],
        Expr::Atom { pred, args } => vec![vec![Literal::atom(pred.clone(), args.clone(), true)]],
        Expr::Eq(a, b) => vec![vec![Literal::eq(a.clone(), b.clone(), true)]],
        Expr::Guard(r) => vec![vec![Literal::Guard(r.clone())]],
        Expr::Not(inner) => match &**inner {
            Expr::Atom { pred, args } => vec![vec![Literal::atom(pred.clone(), args.clone(), false)]],
            Expr::Eq(a, b) => vec![vec![Literal::eq(a.clone(), b.clone(), false)]],
            Expr::Guard(r) => {
                return Err(Error::structural(format!("negated guard on `{r}`")));
            }
            _ => return Err(Error::structural("formula is not in negation normal form")),
        },
        Expr::And(items) => {
            let mut out = Vec::new();
            for i in items {
                out.extend(cnf_nnf(i)?);
                if out.len() > MAX_CNF_CLAUSES {
                    return Err(Error::resource("CNF clauses", out.len() as u128, MAX_CNF_CLAUSES as u128));
                }
            }
            out
        }
        Expr::Or(items) => {
            let mut acc: Vec<Vec<Literal>> = vec![Vec::new()];
            for i in items {
                let part = cnf_nnf(i)?;
                let size = acc.len() as u128 * part.len() as u128;
                if size > MAX_CNF_CLAUSES as u128 {
                    return Err(Error::resource("CNF clauses", size, MAX_CNF_CLAUSES as u128));
                }
                let mut next = Vec::with_capacity(size as usize);
                for a in &acc {
                    for p in &part {
                        let mut c = a.clone();
                        for l in p {
                            if !c.contains(l) {
                                c.push(l.clone());
                            }
                        }
                        next.push(c);
                    }
                }
                next.retain(|c| !c.iter().any(|l| l.negated().is_some_and(|n| c.contains(&n))));
                acc = next;
            }
            acc
        }
        Expr::Forall(..) | Expr::Exists(..) | Expr::SoQuant { .. } => {
            return Err(Error::structural("quantifier inside a propositional matrix"))
        }
    })
}
