//! The intermediate formula `Q₁X₁ ⋯ ∀X_k ∀X_{k+1} ∃x̄(∀ȳ ¬X_{k+1}z̄ȳ ∨ D₁ ∨ ⋯ ∨ D_m)`
//! obtained by Skolemizing the negated first-order part of a prenex source,
//! and its grounding over a structure.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::eval::qbf::QBlock;
use crate::hierarchy::qbf::PrefixedDnfQbf;
use crate::logic::formula::{Expr, Literal, Quantifier, SoFormula, SoQuant, Term};
use crate::logic::fresh::FreshNames;
use crate::logic::structure::FiniteStructure;
use crate::logic::vocab::Vocabulary;
use crate::transforms::prenex::prenex_cnf;
use crate::transforms::skolem::skolemize_fo_named;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Intermediate {
    /// Vocabulary of the source formula.
    pub sigma: Vocabulary,
    /// `X₁, …, X_k, X_{k+1}`; the last two are universal.
    pub prefix: Vec<SoQuant>,
    pub x: Vec<String>,
    /// Variables of `x̄` in the first arguments of `X_{k+1}`.
    pub z: Vec<String>,
    pub y: Vec<String>,
    /// `D₁, …, D_m`, each a conjunction of literals.
    pub terms: Vec<Vec<Literal>>,
}

impl Intermediate {
    /// Number of second-order blocks of the source.
    pub fn k(&self) -> usize {
        self.prefix.len() - 1
    }

    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn skolem(&self) -> &SoQuant {
        &self.prefix[self.k()]
    }

    pub fn arities(&self) -> Vec<usize> {
        self.prefix.iter().map(|q| q.arity).collect()
    }

    /// Index in `prefix` of a second-order variable.
    pub fn so_index(&self, name: &str) -> Option<usize> {
        self.prefix.iter().position(|q| q.name == name)
    }

    /// `X_{k+1} z̄ ȳ` as an expression.
    pub fn witness_atom(&self) -> Expr {
        Expr::atom(
            self.skolem().name.clone(),
            self.z.iter().chain(&self.y).map(Term::var).collect(),
        )
    }

    pub fn to_expr(&self) -> Expr {
        let mut disjuncts = vec![Expr::forall(self.y.clone(), Expr::not(self.witness_atom()))];
        disjuncts.extend(
            self.terms
                .iter()
                .map(|t| Expr::and(t.iter().map(Expr::from_literal).collect())),
        );
        let mut body = Expr::exists(self.x.clone(), Expr::or(disjuncts));
        for q in self.prefix.iter().rev() {
            body = Expr::so(q.quantifier, q.name.clone(), q.arity, body);
        }
        body
    }
}

/// Replaces each guard `some X` by `∃z̄ X z̄`.
fn unguard(e: &Expr, arity: &dyn Fn(&str) -> Option<usize>, fresh: &mut FreshNames) -> Result<Expr> {
    Ok(match e {
        Expr::Guard(r) => {
            let a = arity(r).ok_or_else(|| Error::structural(format!("guard on unknown relation `{r}`")))?;
            let vars = fresh.fresh_many("g", a);
            Expr::exists(vars.clone(), Expr::atom(r.clone(), vars.iter().map(Term::var).collect()))
        }
        Expr::Not(inner) => Expr::not(unguard(inner, arity, fresh)?),
        Expr::And(items) => Expr::And(
            items
                .iter()
                .map(|i| unguard(i, arity, fresh))
                .collect::<Result<_>>()?,
        ),
        Expr::Or(items) => Expr::Or(
            items
                .iter()
                .map(|i| unguard(i, arity, fresh))
                .collect::<Result<_>>()?,
        ),
        Expr::Forall(vs, b) => Expr::Forall(vs.clone(), Box::new(unguard(b, arity, fresh)?)),
        Expr::Exists(vs, b) => Expr::Exists(vs.clone(), Box::new(unguard(b, arity, fresh)?)),
        Expr::SoQuant { .. } => {
            return Err(Error::precondition(
                "the first-order part must not contain second-order quantifiers",
            ))
        }
        other => other.clone(),
    })
}

/// Splits `Q₁X₁ ⋯ Q_kX_k φ` (one variable per block, alternating, the last
/// block universal) into its prefix and `φ`.
fn split_source(source: &SoFormula) -> Result<(Vec<SoQuant>, Expr, Expr)> {
    let e = source.to_expr();
    let (prefix, body) = e.so_prefix();
    let body = body.clone();
    if prefix.is_empty() {
        return Err(Error::precondition("the source needs a second-order prefix"));
    }
    if prefix.windows(2).any(|w| w[0].quantifier == w[1].quantifier) {
        return Err(Error::precondition(
            "the source must quantify one second-order variable per block",
        ));
    }
    if prefix.last().unwrap().quantifier != Quantifier::Forall {
        return Err(Error::precondition(
            "the innermost second-order block must be universal (Σ with an even or Π with an odd number of blocks)",
        ));
    }
    let names: BTreeSet<&str> = prefix.iter().map(|q| q.name.as_str()).collect();
    if names.len() != prefix.len() {
        return Err(Error::precondition("second-order variables must have distinct names"));
    }
    Ok((prefix, body, e))
}

/// Negates the first-order part of the source, Skolemizes it with a fresh
/// `X_{k+1}` and dualizes back, yielding the intermediate formula.
pub fn negate_and_skolemize(source: &SoFormula) -> Result<Intermediate> {
    let (prefix, body, e) = split_source(source)?;
    let sigma = e.signature()?;
    let mut fresh = FreshNames::new(e.names());
    let arity = |r: &str| {
        prefix
            .iter()
            .find(|q| q.name == r)
            .map(|q| q.arity)
            .or_else(|| sigma.relation_arity(r))
    };
    let body = unguard(&body, &arity, &mut fresh)?;
    let negated = prenex_cnf(&Expr::not(body))?;
    let k = prefix.len();
    let name = fresh.claim(&format!("X{}", k + 1));
    let skolem = skolemize_fo_named(&negated, &name)?;
    let u = skolem.universal_form();
    let mut terms = Vec::with_capacity(u.clauses.len());
    for c in &u.clauses {
        if c.is_falsum() {
            terms.push(Vec::new());
            continue;
        }
        let t = c
            .0
            .iter()
            .map(|l| {
                l.negated()
                    .ok_or_else(|| Error::precondition(format!("cannot negate literal {l:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        terms.push(t);
    }
    let mut full = prefix;
    full.push(SoQuant::forall(u.relation.clone(), u.arity));
    Ok(Intermediate {
        sigma,
        prefix: full,
        x: u.universal,
        z: u.z,
        y: u.y,
        terms,
    })
}

/// Which disjunct of the intermediate formula a ground term comes from:
/// `0` for `∀ȳ ¬X_{k+1}z̄ȳ`, `j` for `D_j`; with the assignment to `x̄`.
pub type TermLabel = (usize, Vec<usize>);
/// A ground atom: index of the relation in the prefix and its arguments.
pub type AtomLabel = (usize, Vec<usize>);

/// The ground QBF `ψ_𝒜` with its variables and terms labelled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundIntermediate {
    pub qbf: PrefixedDnfQbf,
    /// Label of variable `v` at index `v − 1`.
    pub atoms: Vec<AtomLabel>,
    pub terms: Vec<TermLabel>,
}

fn tuples(n: usize, len: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = n.pow(len as u32);
    (0..total).map(move |mut i| {
        let mut t = vec![0; len];
        for slot in t.iter_mut().rev() {
            *slot = i % n;
            i /= n;
        }
        t
    })
}

fn term_value(t: &Term, env: &BTreeMap<&str, usize>, s: &FiniteStructure) -> Result<usize> {
    match t {
        Term::Var(v) => env
            .get(v.as_str())
            .copied()
            .ok_or_else(|| Error::structural(format!("unbound variable `{v}`"))),
        Term::Const(c) => s
            .constant(c)
            .ok_or_else(|| Error::structural(format!("structure lacks constant `{c}`"))),
    }
}

/// Grounds the intermediate formula over `s`: the second-order variables
/// become propositional variables `X_i(b̄)` (the last two relations share the
/// innermost block), `∃x̄` becomes a disjunction over `A^|x̄|`, and literals
/// over the vocabulary are evaluated, dropping terms with a false one.
pub fn ground_intermediate(im: &Intermediate, s: &FiniteStructure) -> Result<GroundIntermediate> {
    let n = s.size();
    let k = im.k();
    let mut ids: BTreeMap<AtomLabel, u32> = BTreeMap::new();
    let mut atoms = Vec::new();
    let mut names = Vec::new();
    let mut blocks: Vec<QBlock> = Vec::with_capacity(k);
    for (i, q) in im.prefix.iter().enumerate() {
        let mut vars = Vec::new();
        for b in tuples(n, q.arity) {
            let id = atoms.len() as u32 + 1;
            let args: Vec<String> = b.iter().map(ToString::to_string).collect();
            names.push(format!("{}({})", q.name, args.join(",")));
            ids.insert((i, b.clone()), id);
            atoms.push((i, b));
            vars.push(id);
        }
        if i == k {
            blocks.last_mut().expect("k ≥ 1").vars.extend(vars);
        } else {
            blocks.push(QBlock {
                quantifier: q.quantifier,
                vars,
            });
        }
    }
    let mut terms = Vec::new();
    let mut labels = Vec::new();
    for a in tuples(n, im.x.len()) {
        let env: BTreeMap<&str, usize> = im.x.iter().map(String::as_str).zip(a.iter().copied()).collect();
        let zs = im
            .z
            .iter()
            .map(|z| term_value(&Term::var(z), &env, s))
            .collect::<Result<Vec<_>>>()?;
        let mut witness = Vec::new();
        for b in tuples(n, im.y.len()) {
            let args: Vec<usize> = zs.iter().copied().chain(b).collect();
            witness.push(-(ids[&(k, args)] as i32));
        }
        terms.push(witness);
        labels.push((0, a.clone()));
        'term: for (j, d) in im.terms.iter().enumerate() {
            let mut t = Vec::new();
            for l in d {
                match l {
                    Literal::Atom { pred, args, positive } => {
                        let vals = args
                            .iter()
                            .map(|x| term_value(x, &env, s))
                            .collect::<Result<Vec<_>>>()?;
                        match im.so_index(pred) {
                            Some(i) => {
                                let id = ids[&(i, vals)] as i32;
                                t.push(if *positive { id } else { -id });
                            }
                            None => {
                                let r = s.relation(pred).ok_or_else(|| {
                                    Error::structural(format!("structure lacks relation `{pred}`"))
                                })?;
                                if r.contains(&vals, n) != *positive {
                                    continue 'term;
                                }
                            }
                        }
                    }
                    Literal::Eq { left, right, positive } => {
                        let mut equal = true;
                        for (u, v) in left.iter().zip(right) {
                            equal &= term_value(u, &env, s)? == term_value(v, &env, s)?;
                        }
                        if equal != *positive {
                            continue 'term;
                        }
                    }
                    Literal::Falsum => continue 'term,
                    Literal::Guard(_) => {
                        return Err(Error::precondition("guards do not occur in the intermediate formula"))
                    }
                }
            }
            terms.push(t);
            labels.push((j + 1, a.clone()));
        }
    }
    let qbf = PrefixedDnfQbf {
        names,
        blocks,
        terms,
    };
    qbf.validate()?;
    Ok(GroundIntermediate {
        qbf,
        atoms,
        terms: labels,
    })
}
