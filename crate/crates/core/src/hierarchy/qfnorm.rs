//! Normal forms of quantifier-free formulas with equality, pruned by
//! congruence reasoning.
//!
//! Terms of a DNF are built incrementally. Each partial term keeps the
//! equalities it asserts in a union-find structure, so that terms asserting
//! both `s = t` and `s ≠ t` (or `R s̄` and `¬R t̄` with `s̄`, `t̄` provably
//! equal) are dropped as soon as they arise, and disjunctions already
//! entailed by the term are not expanded. The selector equalities of the
//! interpretation formulas make most branches contradictory, which keeps the
//! result small.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::logic::formula::{Clause, Expr, Literal, Term};
use crate::transforms::prenex::MAX_CNF_CLAUSES;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum Key {
    Var(String),
    Const(String),
}

fn key(t: &Term) -> Key {
    match t {
        Term::Var(v) => Key::Var(v.clone()),
        Term::Const(c) => Key::Const(c.clone()),
    }
}

#[derive(Debug, Clone, Default)]
struct State {
    ids: BTreeMap<Key, usize>,
    parent: Vec<usize>,
    diseqs: Vec<(usize, usize)>,
    atoms: Vec<(String, Vec<usize>, bool)>,
    /// The literals of the term, in insertion order.
    lits: Vec<Literal>,
}

enum Outcome {
    Entailed,
    Added,
    Contradiction,
}

impl State {
    fn id(&mut self, t: &Term) -> usize {
        let k = key(t);
        if let Some(&i) = self.ids.get(&k) {
            return self.find(i);
        }
        let i = self.parent.len();
        self.parent.push(i);
        self.ids.insert(k, i);
        i
    }

    fn find(&self, mut i: usize) -> usize {
        while self.parent[i] != i {
            i = self.parent[i];
        }
        i
    }

    fn consistent(&self) -> bool {
        if self.diseqs.iter().any(|&(a, b)| self.find(a) == self.find(b)) {
            return false;
        }
        for (i, (p, a, s)) in self.atoms.iter().enumerate() {
            for (q, b, t) in &self.atoms[i + 1..] {
                if p == q
                    && s != t
                    && a.len() == b.len()
                    && a.iter().zip(b).all(|(&x, &y)| self.find(x) == self.find(y))
                {
                    return false;
                }
            }
        }
        true
    }

    fn entails(&mut self, lit: &Literal) -> bool {
        match lit {
            Literal::Eq { left, right, positive } => {
                let pairs: Vec<(usize, usize)> =
                    left.iter().zip(right).map(|(a, b)| (self.id(a), self.id(b))).collect();
                if *positive {
                    pairs.iter().all(|&(a, b)| self.find(a) == self.find(b))
                } else {
                    pairs.iter().any(|&(a, b)| self.distinct(a, b))
                }
            }
            Literal::Atom { pred, args, positive } => {
                let ids: Vec<usize> = args.iter().map(|t| self.id(t)).collect();
                self.atoms.iter().any(|(p, a, s)| {
                    p == pred
                        && s == positive
                        && a.len() == ids.len()
                        && a.iter().zip(&ids).all(|(&x, &y)| self.find(x) == self.find(y))
                })
            }
            Literal::Guard(_) => self.lits.contains(lit),
            Literal::Falsum => false,
        }
    }

    fn distinct(&self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        self.diseqs.iter().any(|&(x, y)| {
            let (x, y) = (self.find(x), self.find(y));
            (x, y) == (a, b) || (x, y) == (b, a)
        })
    }

    fn add(&mut self, lit: &Literal) -> Outcome {
        if let Literal::Eq { left, right, positive } = lit {
            if left.iter().zip(right).all(|(a, b)| a == b) {
                return if *positive { Outcome::Entailed } else { Outcome::Contradiction };
            }
        }
        if self.entails(lit) {
            return Outcome::Entailed;
        }
        match lit {
            Literal::Eq { left, right, positive: true } => {
                for (a, b) in left.iter().zip(right) {
                    let (x, y) = (self.id(a), self.id(b));
                    if x != y {
                        self.parent[x] = y;
                    }
                }
            }
            Literal::Eq { left, right, positive: false } => {
                // a tuple disequality is a disjunction; only single coordinates are tracked
                if left.len() == 1 {
                    let (x, y) = (self.id(&left[0]), self.id(&right[0]));
                    self.diseqs.push((x, y));
                }
            }
            Literal::Atom { pred, args, positive } => {
                let ids = args.iter().map(|t| self.id(t)).collect();
                self.atoms.push((pred.clone(), ids, *positive));
            }
            Literal::Guard(_) => {}
            Literal::Falsum => return Outcome::Contradiction,
        }
        self.lits.push(lit.clone());
        if self.consistent() {
            Outcome::Added
        } else {
            Outcome::Contradiction
        }
    }
}

fn literal_of(e: &Expr) -> Option<Literal> {
    Some(match e {
        Expr::Atom { pred, args } => Literal::atom(pred.clone(), args.clone(), true),
        Expr::Eq(a, b) => Literal::eq(a.clone(), b.clone(), true),
        Expr::Guard(r) => Literal::Guard(r.clone()),
        Expr::Not(inner) => match &**inner {
            Expr::Atom { pred, args } => Literal::atom(pred.clone(), args.clone(), false),
            Expr::Eq(a, b) => Literal::eq(a.clone(), b.clone(), false),
            _ => return None,
        },
        _ => return None,
    })
}

fn flatten_and<'a>(e: &'a Expr, out: &mut Vec<&'a Expr>) {
    match e {
        Expr::And(items) => items.iter().for_each(|i| flatten_and(i, out)),
        Expr::True => {}
        other => out.push(other),
    }
}

/// Whether `state` already entails `e` (checked syntactically on literals
/// and conjunctions of literals).
fn entailed(state: &mut State, e: &Expr) -> bool {
    match e {
        Expr::True => true,
        Expr::And(items) => items.iter().all(|i| entailed(state, i)),
        Expr::Or(items) => items.iter().any(|i| entailed(state, i)),
        other => literal_of(other).is_some_and(|l| state.entails(&l)),
    }
}

struct Builder {
    budget: usize,
}

impl Builder {
    fn conj(&self, e: &Expr, states: Vec<State>) -> Result<Vec<State>> {
        let mut parts = Vec::new();
        flatten_and(e, &mut parts);
        // literals first, so that disjunctions are expanded under the most context
        parts.sort_by_key(|p| literal_of(p).is_none());
        let mut states = states;
        for p in parts {
            let mut next = Vec::with_capacity(states.len());
            for s in states {
                next.extend(self.one(p, s)?);
            }
            if next.len() > self.budget {
                return Err(Error::resource("normal-form terms", next.len() as u128, self.budget as u128));
            }
            states = next;
            if states.is_empty() {
                break;
            }
        }
        Ok(states)
    }

    fn one(&self, e: &Expr, mut s: State) -> Result<Vec<State>> {
        if let Some(l) = literal_of(e) {
            return Ok(match s.add(&l) {
                Outcome::Contradiction => Vec::new(),
                _ => vec![s],
            });
        }
        match e {
            Expr::True => Ok(vec![s]),
            Expr::False => Ok(Vec::new()),
            Expr::And(_) => self.conj(e, vec![s]),
            Expr::Or(items) => {
                if items.iter().any(|i| entailed(&mut s, i)) {
                    return Ok(vec![s]);
                }
                let mut out = Vec::new();
                for i in items {
                    out.extend(self.conj(i, vec![s.clone()])?);
                }
                Ok(out)
            }
            _ => Err(Error::precondition(
                "normal forms need a quantifier-free formula in negation normal form",
            )),
        }
    }
}

/// DNF of a quantifier-free formula. Contradictory terms are dropped and
/// terms whose literals include those of another term are removed.
pub fn dnf(e: &Expr) -> Result<Vec<Vec<Literal>>> {
    let b = Builder {
        budget: MAX_CNF_CLAUSES,
    };
    let states = b.conj(&e.nnf(), vec![State::default()])?;
    Ok(subsume(states.into_iter().map(|s| s.lits).collect()))
}

/// CNF of a quantifier-free formula. Conjunctions are split, disjunctions
/// of conjunctions of literals are distributed directly, and anything else
/// is the negation of the DNF of its negation.
pub fn cnf(e: &Expr) -> Result<Vec<Clause>> {
    let mut raw = Vec::new();
    cnf_nnf(&e.nnf(), &mut raw)?;
    let mut out: Vec<Clause> = Vec::with_capacity(raw.len());
    for c in raw {
        out.extend(Clause(c).normalize());
    }
    if out.iter().any(Clause::is_falsum) {
        return Ok(vec![Clause::falsum()]);
    }
    Ok(subsume(out.into_iter().map(|c| c.0).filter(|c| !tautology(c)).collect())
        .into_iter()
        .map(Clause)
        .collect())
}

fn conjunction_literals(e: &Expr) -> Option<Vec<Literal>> {
    match e {
        Expr::And(items) => items.iter().map(literal_of).collect(),
        Expr::True => Some(Vec::new()),
        other => literal_of(other).map(|l| vec![l]),
    }
}

fn cnf_nnf(e: &Expr, out: &mut Vec<Vec<Literal>>) -> Result<()> {
    if let Some(l) = literal_of(e) {
        out.push(vec![l]);
        return Ok(());
    }
    match e {
        Expr::True => Ok(()),
        Expr::False => {
            out.push(Vec::new());
            Ok(())
        }
        Expr::And(items) => items.iter().try_for_each(|i| cnf_nnf(i, out)),
        Expr::Or(items) => {
            if let Some(parts) = items.iter().map(conjunction_literals).collect::<Option<Vec<_>>>() {
                out.extend(distribute(&parts)?);
                return Ok(());
            }
            for t in dnf(&Expr::not(e.clone()))? {
                let lits = t
                    .iter()
                    .map(|l| {
                        l.negated()
                            .ok_or_else(|| Error::precondition("guards cannot be negated"))
                    })
                    .collect::<Result<Vec<_>>>()?;
                out.push(lits);
            }
            Ok(())
        }
        _ => Err(Error::precondition(
            "normal forms need a quantifier-free formula in negation normal form",
        )),
    }
}

/// Whether the clause is valid, i.e. its negation is contradictory under
/// congruence reasoning.
fn tautology(c: &[Literal]) -> bool {
    let mut s = State::default();
    c.iter()
        .filter_map(Literal::negated)
        .any(|n| matches!(s.add(&n), Outcome::Contradiction))
}

/// CNF of `⋁ᵢ ⋀ parts[i]`, removing tautologies and subsumed clauses after
/// each step.
fn distribute(parts: &[Vec<Literal>]) -> Result<Vec<Vec<Literal>>> {
    let mut cur: Vec<Vec<Literal>> = vec![Vec::new()];
    for lits in parts {
        let mut next = Vec::with_capacity(cur.len() * lits.len());
        for c in &cur {
            for l in lits {
                let mut d = c.clone();
                if !d.contains(l) {
                    d.push(l.clone());
                    d.sort();
                }
                if !tautology(&d) {
                    next.push(d);
                }
            }
        }
        if next.len() > MAX_CNF_CLAUSES {
            return Err(Error::resource("CNF clauses", next.len() as u128, MAX_CNF_CLAUSES as u128));
        }
        cur = subsume(next);
    }
    Ok(cur)
}

/// Removes duplicates and sets that contain another set of the list.
fn subsume(mut sets: Vec<Vec<Literal>>) -> Vec<Vec<Literal>> {
    for s in &mut sets {
        s.sort();
        s.dedup();
    }
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut kept: Vec<Vec<Literal>> = Vec::with_capacity(sets.len());
    for s in sets {
        if !kept.iter().any(|k| k.iter().all(|l| s.binary_search(l).is_ok())) {
            kept.push(s);
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::limits::Limits;
    use crate::eval::tree::eval_tree;
    use crate::harness::enumerate::enumerate_structures;
    use crate::textio::parse_formula;
    use crate::transforms::prenex::cnf_expr;

    fn check(src: &str) {
        let e = parse_formula(src).unwrap().to_expr();
        let (vars, body) = match &e {
            Expr::Forall(vs, b) => (vs.clone(), (**b).clone()),
            _ => (vec![], e.clone()),
        };
        let c = cnf(&body).unwrap();
        let d = dnf(&body).unwrap();
        let as_cnf = Expr::forall(vars.clone(), cnf_expr(&c));
        let as_dnf = Expr::forall(
            vars.clone(),
            Expr::or(
                d.iter()
                    .map(|t| Expr::and(t.iter().map(Expr::from_literal).collect()))
                    .collect(),
            ),
        );
        let vocab = e.signature().unwrap();
        let limits = Limits::default();
        for n in 1..=3 {
            for s in enumerate_structures(&vocab, n, 1 << 12).unwrap() {
                let want = eval_tree(&e, &s, &limits).unwrap();
                assert_eq!(eval_tree(&as_cnf, &s, &limits).unwrap(), want, "cnf of {src}");
                assert_eq!(eval_tree(&as_dnf, &s, &limits).unwrap(), want, "dnf of {src}");
            }
        }
    }

    #[test]
    fn agrees_with_evaluation() {
        check("forall x y z. (x = y & y = z) -> x = z");
        check("forall x y z. (x = y | P(x)) & (~P(y) | y = z)");
        check("forall x y. (P(x) & x = y) -> P(y)");
        check("forall x y z. ~(x = y) | (E(x,z) <-> E(y,z))");
        check("forall x y. (x = y & ~(x = y)) | E(x,y)");
    }

    #[test]
    fn congruence_prunes() {
        let e = parse_formula("forall x y. (P(x) & x = y & ~P(y))").unwrap().to_expr();
        let Expr::Forall(_, body) = e else { unreachable!() };
        assert!(dnf(&body).unwrap().is_empty());
        assert_eq!(cnf(&Expr::not(*body)).unwrap(), vec![]);
    }

    #[test]
    fn exclusive_selectors_do_not_multiply() {
        // (a = b ∧ c ≠ b) ∨ ... with pairwise exclusive selectors
        let vars: Vec<Term> = (0..8).map(|i| Term::var(format!("v{i}"))).collect();
        let sel = |i: usize| {
            Expr::and(
                (2..8)
                    .map(|j| {
                        if j <= i + 2 {
                            Expr::eq(vars[0].clone(), vars[j].clone())
                        } else {
                            Expr::eq(vars[1].clone(), vars[j].clone())
                        }
                    })
                    .collect(),
            )
        };
        let e = Expr::and(vec![
            Expr::not(Expr::eq(vars[0].clone(), vars[1].clone())),
            Expr::or((0..6).map(sel).collect()),
            Expr::and((0..6).map(|i| Expr::implies(sel(i), Expr::atom("P", vec![vars[i + 2].clone()]))).collect()),
        ]);
        let d = dnf(&e).unwrap();
        assert_eq!(d.len(), 6);
    }

    #[test]
    fn staircase_disjunction_stays_small() {
        let m = 10;
        let v: Vec<Term> = (0..m + 5).map(|i| Term::var(format!("v{i}"))).collect();
        let sel = |j: usize| {
            Expr::and(
                (4..=m + 4)
                    .map(|l| {
                        let end = if j == 0 { 4 } else { j + 4 };
                        let anchor = if l <= end { &v[1] } else { &v[3] };
                        Expr::eq(anchor.clone(), v[l].clone())
                    })
                    .collect(),
            )
        };
        let c = cnf(&Expr::or((0..=m).map(sel).collect())).unwrap();
        assert!(c.len() <= (m + 1) * (m + 1), "{} clauses", c.len());
    }
}
