//! Abstract syntax for second-order formulas.
//!
//! Two shapes are distinguished. [`ClausalFormula`] is the prefixed clausal
//! form used by the Krom family: a second-order prefix, a block of universal
//! first-order variables and a clause matrix. [`Expr`] is an arbitrary
//! second-order formula tree, used as translation input and as the target of
//! the brute-force evaluator. [`SoFormula`] wraps either, plus a top-level
//! disjunction of clausal formulas (the output shape of guard expansion).

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::Const(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self {
            Term::Var(n) => Some(n),
            Term::Const(_) => None,
        }
    }
}

pub fn vars(names: &[&str]) -> Vec<Term> {
    names.iter().map(|n| Term::var(*n)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn dual(self) -> Self {
        match self {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        }
    }
}

/// A literal of a clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Literal {
    /// `R(t̄)` or `¬R(t̄)`; `R` is a vocabulary relation or a second-order variable.
    Atom {
        pred: String,
        args: Vec<Term>,
        positive: bool,
    },
    /// `∃z̄ R z̄`: true iff the relation is nonempty. Always positive.
    Guard(String),
    Falsum,
    /// `t̄ = s̄` (coordinate-wise) or its negation. Single equalities use length 1.
    Eq {
        left: Vec<Term>,
        right: Vec<Term>,
        positive: bool,
    },
}

impl Literal {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>, positive: bool) -> Self {
        Literal::Atom {
            pred: pred.into(),
            args,
            positive,
        }
    }

    pub fn pos(pred: impl Into<String>, args: &[&str]) -> Self {
        Literal::atom(pred, vars(args), true)
    }

    pub fn neg(pred: impl Into<String>, args: &[&str]) -> Self {
        Literal::atom(pred, vars(args), false)
    }

    pub fn eq(left: Term, right: Term, positive: bool) -> Self {
        Literal::Eq {
            left: vec![left],
            right: vec![right],
            positive,
        }
    }

    pub fn tuple_eq(left: Vec<Term>, right: Vec<Term>, positive: bool) -> Result<Self> {
        if left.len() != right.len() {
            return Err(Error::structural(format!(
                "tuple equality between lengths {} and {}",
                left.len(),
                right.len()
            )));
        }
        Ok(Literal::Eq {
            left,
            right,
            positive,
        })
    }

    /// The complementary literal. Guards and falsum have no literal complement.
    pub fn negated(&self) -> Option<Literal> {
        match self {
            Literal::Atom {
                pred,
                args,
                positive,
            } => Some(Literal::Atom {
                pred: pred.clone(),
                args: args.clone(),
                positive: !positive,
            }),
            Literal::Eq {
                left,
                right,
                positive,
            } if left.len() == 1 => Some(Literal::Eq {
                left: left.clone(),
                right: right.clone(),
                positive: !positive,
            }),
            _ => None,
        }
    }

    /// The relation symbol or second-order variable this literal mentions.
    pub fn relation(&self) -> Option<&str> {
        match self {
            Literal::Atom { pred, .. } => Some(pred),
            Literal::Guard(r) => Some(r),
            _ => None,
        }
    }

    pub fn terms(&self) -> Vec<&Term> {
        match self {
            Literal::Atom { args, .. } => args.iter().collect(),
            Literal::Eq { left, right, .. } => left.iter().chain(right).collect(),
            _ => Vec::new(),
        }
    }

    pub fn map_terms(&self, f: &impl Fn(&Term) -> Term) -> Literal {
        match self {
            Literal::Atom {
                pred,
                args,
                positive,
            } => Literal::Atom {
                pred: pred.clone(),
                args: args.iter().map(f).collect(),
                positive: *positive,
            },
            Literal::Eq {
                left,
                right,
                positive,
            } => Literal::Eq {
                left: left.iter().map(f).collect(),
                right: right.iter().map(f).collect(),
                positive: *positive,
            },
            other => other.clone(),
        }
    }

    /// Syntactic truth value, if the literal is trivially decided.
    fn trivial_value(&self) -> Option<bool> {
        match self {
            Literal::Falsum => Some(false),
            Literal::Eq {
                left,
                right,
                positive,
            } => {
                if left == right || left.is_empty() {
                    Some(*positive)
                } else {
                    None
                }
            }
            _ => None,
        }
    }
}

/// A disjunction of literals. An empty clause never occurs after
/// normalization; unsatisfiable clauses are written `(false)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause(pub Vec<Literal>);

impl Clause {
    pub fn new(literals: Vec<Literal>) -> Self {
        Clause(literals)
    }

    pub fn falsum() -> Self {
        Clause(vec![Literal::Falsum])
    }

    pub fn literals(&self) -> &[Literal] {
        &self.0
    }

    pub fn is_falsum(&self) -> bool {
        self.0.iter().all(|l| *l == Literal::Falsum)
    }

    /// Normalizes the clause into an equivalent conjunction of clauses:
    /// tuple equalities are split coordinate-wise (positive ones distribute
    /// over the rest of the clause), `t = t` makes the clause true and is
    /// dropped with it, `⊥` and `t ≠ t` disappear, duplicate literals are
    /// merged and an emptied clause becomes `(false)`.
    pub fn normalize(&self) -> Vec<Clause> {
        // Each literal contributes a CNF; the clause is the disjunction of those CNFs.
        let mut product: Vec<Vec<Literal>> = vec![Vec::new()];
        for lit in &self.0 {
            let cnf: Vec<Vec<Literal>> = match lit.trivial_value() {
                Some(true) => return Vec::new(),
                Some(false) => continue,
                None => match lit {
                    Literal::Eq {
                        left,
                        right,
                        positive: true,
                    } => left
                        .iter()
                        .zip(right)
                        .filter(|(l, r)| l != r)
                        .map(|(l, r)| vec![Literal::eq(l.clone(), r.clone(), true)])
                        .collect(),
                    Literal::Eq {
                        left,
                        right,
                        positive: false,
                    } => {
                        let lits: Vec<Literal> = left
                            .iter()
                            .zip(right)
                            .filter(|(l, r)| l != r)
                            .map(|(l, r)| Literal::eq(l.clone(), r.clone(), false))
                            .collect();
                        vec![lits]
                    }
                    other => vec![vec![other.clone()]],
                },
            };
            if cnf.is_empty() {
                // the literal is equivalent to true
                return Vec::new();
            }
            let mut next = Vec::with_capacity(product.len() * cnf.len());
            for base in &product {
                for extra in &cnf {
                    let mut c = base.clone();
                    c.extend(extra.iter().cloned());
                    next.push(c);
                }
            }
            product = next;
        }
        product
            .into_iter()
            .map(|mut lits| {
                dedup_preserving_order(&mut lits);
                if lits.is_empty() {
                    Clause::falsum()
                } else {
                    Clause(lits)
                }
            })
            .collect()
    }
}

pub(crate) fn dedup_preserving_order<T: PartialEq + Clone>(items: &mut Vec<T>) {
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for it in items.drain(..) {
        if !out.contains(&it) {
            out.push(it);
        }
    }
    *items = out;
}

/// Normalizes every clause of a matrix (see [`Clause::normalize`]).
pub fn normalize_matrix(matrix: &[Clause]) -> Vec<Clause> {
    matrix.iter().flat_map(Clause::normalize).collect()
}

/// `Q R/arity` in a second-order prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SoQuant {
    pub quantifier: Quantifier,
    pub name: String,
    pub arity: usize,
}

impl SoQuant {
    pub fn exists(name: impl Into<String>, arity: usize) -> Self {
        SoQuant {
            quantifier: Quantifier::Exists,
            name: name.into(),
            arity,
        }
    }

    pub fn forall(name: impl Into<String>, arity: usize) -> Self {
        SoQuant {
            quantifier: Quantifier::Forall,
            name: name.into(),
            arity,
        }
    }
}

/// `∃ȳ Q₁R₁ ⋯ QₘRₘ ∀x̄ (C₁ ∧ ⋯ ∧ Cₙ)`. The first-order existential prefix `ȳ`
/// is empty except for disjuncts produced by guard expansion.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClausalFormula {
    pub fo_exists: Vec<String>,
    pub so_prefix: Vec<SoQuant>,
    pub fo_universal: Vec<String>,
    pub matrix: Vec<Clause>,
}

impl ClausalFormula {
    pub fn new(so_prefix: Vec<SoQuant>, fo_universal: Vec<String>, matrix: Vec<Clause>) -> Self {
        ClausalFormula {
            fo_exists: Vec::new(),
            so_prefix,
            fo_universal,
            matrix,
        }
    }

    pub fn so_var(&self, name: &str) -> Option<&SoQuant> {
        self.so_prefix.iter().find(|q| q.name == name)
    }

    pub fn is_so_var(&self, name: &str) -> bool {
        self.so_var(name).is_some()
    }

    /// Maximal runs of equally quantified prefix variables, as index ranges.
    pub fn blocks(&self) -> Vec<(Quantifier, Vec<usize>)> {
        let mut out: Vec<(Quantifier, Vec<usize>)> = Vec::new();
        for (i, q) in self.so_prefix.iter().enumerate() {
            match out.last_mut() {
                Some((kind, members)) if *kind == q.quantifier => members.push(i),
                _ => out.push((q.quantifier, vec![i])),
            }
        }
        out
    }

    /// Number of literals in `clause` that mention a quantified second-order
    /// variable (atoms and guards).
    pub fn so_literal_count(&self, clause: &Clause) -> usize {
        clause
            .0
            .iter()
            .filter(|l| l.relation().is_some_and(|r| self.is_so_var(r)))
            .count()
    }

    pub fn has_guards(&self) -> bool {
        self.matrix
            .iter()
            .flat_map(|c| &c.0)
            .any(|l| matches!(l, Literal::Guard(_)))
    }

    /// True formula: no clauses.
    pub fn is_trivially_true(&self) -> bool {
        self.matrix.is_empty()
    }

    /// Checks scoping and arity consistency. `extra_relations` lists relation
    /// symbols that may be used without being declared (e.g. frozen
    /// second-order variables of an enclosing formula); everything else not
    /// in the prefix is treated as a vocabulary symbol.
    pub fn validate(&self) -> Result<()> {
        let mut so_names = BTreeSet::new();
        for q in &self.so_prefix {
            if !so_names.insert(q.name.as_str()) {
                return Err(Error::structural(format!(
                    "second-order variable `{}` quantified twice",
                    q.name
                )));
            }
        }
        let mut fo_names = BTreeSet::new();
        for v in self.fo_exists.iter().chain(&self.fo_universal) {
            if !fo_names.insert(v.as_str()) {
                return Err(Error::structural(format!(
                    "first-order variable `{v}` bound twice"
                )));
            }
            if so_names.contains(v.as_str()) {
                return Err(Error::structural(format!(
                    "`{v}` used as both a first- and second-order variable"
                )));
            }
        }
        let mut arities: BTreeMap<&str, usize> = BTreeMap::new();
        for q in &self.so_prefix {
            arities.insert(&q.name, q.arity);
        }
        for clause in &self.matrix {
            for lit in &clause.0 {
                for t in lit.terms() {
                    match t {
                        Term::Var(v) if !fo_names.contains(v.as_str()) => {
                            return Err(Error::structural(format!("unbound variable `{v}`")))
                        }
                        Term::Const(c) if fo_names.contains(c.as_str()) => {
                            return Err(Error::structural(format!(
                                "`{c}` used as both a variable and a constant"
                            )))
                        }
                        _ => {}
                    }
                }
                match lit {
                    Literal::Atom { pred, args, .. } => match arities.get(pred.as_str()) {
                        Some(&a) if a != args.len() => {
                            return Err(Error::structural(format!(
                                "`{pred}` has arity {a} but is applied to {} arguments",
                                args.len()
                            )))
                        }
                        Some(_) => {}
                        None => {
                            arities.insert(pred, args.len());
                        }
                    },
                    Literal::Eq { left, right, .. } if left.len() != right.len() => {
                        return Err(Error::structural("tuple equality with mismatched lengths"))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }

    /// Vocabulary symbols used by the formula (everything that is not a
    /// quantified second-order variable).
    pub fn signature(&self) -> Result<Vocabulary> {
        let mut sig = Signature::default();
        for clause in &self.matrix {
            for lit in &clause.0 {
                sig.literal(lit, &|r| self.is_so_var(r))?;
            }
        }
        sig.into_vocabulary()
    }

    pub fn to_expr(&self) -> Expr {
        let clauses: Vec<Expr> = self
            .matrix
            .iter()
            .map(|c| Expr::or(c.0.iter().map(Expr::from_literal).collect()))
            .collect();
        let mut body = Expr::forall(self.fo_universal.clone(), Expr::and(clauses));
        for q in self.so_prefix.iter().rev() {
            body = Expr::so(q.quantifier, q.name.clone(), q.arity, body);
        }
        Expr::exists(self.fo_exists.clone(), body)
    }

    /// All identifiers occurring in the formula.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out: BTreeSet<String> = self
            .fo_exists
            .iter()
            .chain(&self.fo_universal)
            .cloned()
            .collect();
        out.extend(self.so_prefix.iter().map(|q| q.name.clone()));
        for lit in self.matrix.iter().flat_map(|c| &c.0) {
            if let Some(r) = lit.relation() {
                out.insert(r.to_string());
            }
            out.extend(lit.terms().into_iter().map(|t| t.name().to_string()));
        }
        out
    }
}

#[derive(Default)]
struct Signature {
    constants: BTreeSet<String>,
    relations: BTreeMap<String, usize>,
}

impl Signature {
    fn literal(&mut self, lit: &Literal, is_so: &dyn Fn(&str) -> bool) -> Result<()> {
        for t in lit.terms() {
            if let Term::Const(c) = t {
                self.constants.insert(c.clone());
            }
        }
        if let Literal::Atom { pred, args, .. } = lit {
            if !is_so(pred) {
                self.relation(pred, args.len())?;
            }
        }
        Ok(())
    }

    fn relation(&mut self, pred: &str, arity: usize) -> Result<()> {
        match self.relations.get(pred) {
            Some(&a) if a != arity => Err(Error::structural(format!(
                "relation `{pred}` used with arities {a} and {arity}"
            ))),
            _ => {
                self.relations.insert(pred.to_string(), arity);
                Ok(())
            }
        }
    }

    fn into_vocabulary(self) -> Result<Vocabulary> {
        Vocabulary::new(self.constants, self.relations)
    }
}

/// An arbitrary second-order formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    True,
    False,
    Atom { pred: String, args: Vec<Term> },
    Eq(Term, Term),
    /// `∃z̄ R z̄`.
    Guard(String),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Forall(Vec<String>, Box<Expr>),
    Exists(Vec<String>, Box<Expr>),
    SoQuant {
        quantifier: Quantifier,
        name: String,
        arity: usize,
        body: Box<Expr>,
    },
}

impl Expr {
    pub fn atom(pred: impl Into<String>, args: Vec<Term>) -> Expr {
        Expr::Atom {
            pred: pred.into(),
            args,
        }
    }

    pub fn eq(a: Term, b: Term) -> Expr {
        Expr::Eq(a, b)
    }

    /// Conjunction, flattening nothing but collapsing the trivial cases.
    pub fn and(mut items: Vec<Expr>) -> Expr {
        match items.len() {
            0 => Expr::True,
            1 => items.pop().unwrap(),
            _ => Expr::And(items),
        }
    }

    pub fn or(mut items: Vec<Expr>) -> Expr {
        match items.len() {
            0 => Expr::False,
            1 => items.pop().unwrap(),
            _ => Expr::Or(items),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(e: Expr) -> Expr {
        Expr::Not(Box::new(e))
    }

    pub fn implies(a: Expr, b: Expr) -> Expr {
        Expr::or(vec![Expr::not(a), b])
    }

    pub fn forall(vars: Vec<String>, body: Expr) -> Expr {
        if vars.is_empty() {
            body
        } else {
            Expr::Forall(vars, Box::new(body))
        }
    }

    pub fn exists(vars: Vec<String>, body: Expr) -> Expr {
        if vars.is_empty() {
            body
        } else {
            Expr::Exists(vars, Box::new(body))
        }
    }

    pub fn so(quantifier: Quantifier, name: impl Into<String>, arity: usize, body: Expr) -> Expr {
        Expr::SoQuant {
            quantifier,
            name: name.into(),
            arity,
            body: Box::new(body),
        }
    }

    /// Equality of two tuples, as a conjunction.
    pub fn tuple_eq(left: &[Term], right: &[Term]) -> Expr {
        Expr::and(
            left.iter()
                .zip(right)
                .map(|(a, b)| Expr::eq(a.clone(), b.clone()))
                .collect(),
        )
    }

    pub fn from_literal(lit: &Literal) -> Expr {
        match lit {
            Literal::Atom {
                pred,
                args,
                positive,
            } => {
                let a = Expr::atom(pred.clone(), args.clone());
                if *positive {
                    a
                } else {
                    Expr::not(a)
                }
            }
            Literal::Guard(r) => Expr::Guard(r.clone()),
            Literal::Falsum => Expr::False,
            Literal::Eq {
                left,
                right,
                positive,
            } => {
                let e = Expr::tuple_eq(left, right);
                if *positive {
                    e
                } else {
                    Expr::not(e)
                }
            }
        }
    }

    /// Negation normal form: negations only in front of atoms, equalities
    /// and guards; quantifiers dualized.
    pub fn nnf(&self) -> Expr {
        self.nnf_polar(true)
    }

    fn nnf_polar(&self, positive: bool) -> Expr {
        match self {
            Expr::True => {
                if positive {
                    Expr::True
                } else {
                    Expr::False
                }
            }
            Expr::False => {
                if positive {
                    Expr::False
                } else {
                    Expr::True
                }
            }
            Expr::Atom { .. } | Expr::Eq(..) | Expr::Guard(_) => {
                if positive {
                    self.clone()
                } else {
                    Expr::not(self.clone())
                }
            }
            Expr::Not(inner) => inner.nnf_polar(!positive),
            Expr::And(items) | Expr::Or(items) => {
                let kids = items.iter().map(|e| e.nnf_polar(positive)).collect();
                let conj = matches!(self, Expr::And(_)) == positive;
                if conj {
                    Expr::and(kids)
                } else {
                    Expr::or(kids)
                }
            }
            Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
                let universal = matches!(self, Expr::Forall(..)) == positive;
                let b = body.nnf_polar(positive);
                if universal {
                    Expr::forall(vs.clone(), b)
                } else {
                    Expr::exists(vs.clone(), b)
                }
            }
            Expr::SoQuant {
                quantifier,
                name,
                arity,
                body,
            } => {
                let q = if positive {
                    *quantifier
                } else {
                    quantifier.dual()
                };
                Expr::so(q, name.clone(), *arity, body.nnf_polar(positive))
            }
        }
    }

    /// Free first-order variables.
    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Expr::Atom { args, .. } => args.iter().for_each(|t| term(t, bound)),
            Expr::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Expr::Not(e) => e.collect_free(bound, out),
            Expr::And(items) | Expr::Or(items) => {
                for e in items {
                    e.collect_free(bound, out);
                }
            }
            Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
                let mark = bound.len();
                bound.extend(vs.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(mark);
            }
            Expr::SoQuant { body, .. } => body.collect_free(bound, out),
            Expr::True | Expr::False | Expr::Guard(_) => {}
        }
    }

    /// Whether the formula contains a second-order quantifier.
    pub fn has_so_quantifier(&self) -> bool {
        match self {
            Expr::SoQuant { .. } => true,
            Expr::Not(e) | Expr::Forall(_, e) | Expr::Exists(_, e) => e.has_so_quantifier(),
            Expr::And(items) | Expr::Or(items) => items.iter().any(Expr::has_so_quantifier),
            _ => false,
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Expr::SoQuant { .. } | Expr::Forall(..) | Expr::Exists(..) | Expr::Guard(_) => false,
            Expr::Not(e) => e.is_quantifier_free(),
            Expr::And(items) | Expr::Or(items) => items.iter().all(Expr::is_quantifier_free),
            _ => true,
        }
    }

    /// Splits a leading block of second-order quantifiers off the formula.
    pub fn so_prefix(&self) -> (Vec<SoQuant>, &Expr) {
        let mut prefix = Vec::new();
        let mut cur = self;
        while let Expr::SoQuant {
            quantifier,
            name,
            arity,
            body,
        } = cur
        {
            prefix.push(SoQuant {
                quantifier: *quantifier,
                name: name.clone(),
                arity: *arity,
            });
            cur = body;
        }
        (prefix, cur)
    }

    /// Replaces free occurrences of first-order variables according to `map`.
    /// The caller guarantees that replacement terms are not captured.
    pub fn rename_free(&self, map: &BTreeMap<String, Term>) -> Expr {
        let sub = |t: &Term| match t {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| t.clone()),
            Term::Const(_) => t.clone(),
        };
        match self {
            Expr::Atom { pred, args } => Expr::atom(pred.clone(), args.iter().map(sub).collect()),
            Expr::Eq(a, b) => Expr::Eq(sub(a), sub(b)),
            Expr::Not(e) => Expr::not(e.rename_free(map)),
            Expr::And(items) => Expr::And(items.iter().map(|e| e.rename_free(map)).collect()),
            Expr::Or(items) => Expr::Or(items.iter().map(|e| e.rename_free(map)).collect()),
            Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
                let mut inner = map.clone();
                for v in vs {
                    inner.remove(v);
                }
                let b = Box::new(body.rename_free(&inner));
                if matches!(self, Expr::Forall(..)) {
                    Expr::Forall(vs.clone(), b)
                } else {
                    Expr::Exists(vs.clone(), b)
                }
            }
            Expr::SoQuant {
                quantifier,
                name,
                arity,
                body,
            } => Expr::so(*quantifier, name.clone(), *arity, body.rename_free(map)),
            other => other.clone(),
        }
    }

    /// Vocabulary symbols used (relations that are not bound by an enclosing
    /// second-order quantifier, and constants).
    pub fn signature(&self) -> Result<Vocabulary> {
        let mut sig = Signature::default();
        self.collect_signature(&mut Vec::new(), &mut sig)?;
        sig.into_vocabulary()
    }

    fn collect_signature(&self, bound: &mut Vec<String>, sig: &mut Signature) -> Result<()> {
        let consts = |ts: &[&Term], sig: &mut Signature| {
            for t in ts {
                if let Term::Const(c) = t {
                    sig.constants.insert(c.clone());
                }
            }
        };
        match self {
            Expr::Atom { pred, args } => {
                consts(&args.iter().collect::<Vec<_>>(), sig);
                if !bound.contains(pred) {
                    sig.relation(pred, args.len())?;
                }
            }
            Expr::Eq(a, b) => consts(&[a, b], sig),
            Expr::Not(e) | Expr::Forall(_, e) | Expr::Exists(_, e) => {
                e.collect_signature(bound, sig)?
            }
            Expr::And(items) | Expr::Or(items) => {
                for e in items {
                    e.collect_signature(bound, sig)?;
                }
            }
            Expr::SoQuant { name, body, .. } => {
                bound.push(name.clone());
                body.collect_signature(bound, sig)?;
                bound.pop();
            }
            Expr::True | Expr::False | Expr::Guard(_) => {}
        }
        Ok(())
    }

    /// Every identifier occurring anywhere in the formula.
    pub fn names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Atom { pred, args } => {
                out.insert(pred.clone());
                out.extend(args.iter().map(|t| t.name().to_string()));
            }
            Expr::Eq(a, b) => {
                out.insert(a.name().to_string());
                out.insert(b.name().to_string());
            }
            Expr::Guard(r) => {
                out.insert(r.clone());
            }
            Expr::Not(e) => e.collect_names(out),
            Expr::And(items) | Expr::Or(items) => items.iter().for_each(|e| e.collect_names(out)),
            Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
                out.extend(vs.iter().cloned());
                body.collect_names(out);
            }
            Expr::SoQuant { name, body, .. } => {
                out.insert(name.clone());
                body.collect_names(out);
            }
            Expr::True | Expr::False => {}
        }
    }

    /// Number of nodes; used for size guards in normal-form conversions.
    pub fn size(&self) -> usize {
        match self {
            Expr::Not(e) | Expr::Forall(_, e) | Expr::Exists(_, e) => 1 + e.size(),
            Expr::SoQuant { body, .. } => 1 + body.size(),
            Expr::And(items) | Expr::Or(items) => 1 + items.iter().map(Expr::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// A second-order formula in one of the shapes the toolkit handles.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SoFormula {
    Clausal(ClausalFormula),
    /// Disjunction of clausal formulas, each possibly under a first-order
    /// existential prefix.
    Disjunction(Vec<ClausalFormula>),
    General(Expr),
}

impl SoFormula {
    pub fn to_expr(&self) -> Expr {
        match self {
            SoFormula::Clausal(c) => c.to_expr(),
            SoFormula::Disjunction(ds) => Expr::or(ds.iter().map(ClausalFormula::to_expr).collect()),
            SoFormula::General(e) => e.clone(),
        }
    }

    pub fn as_clausal(&self) -> Option<&ClausalFormula> {
        match self {
            SoFormula::Clausal(c) => Some(c),
            _ => None,
        }
    }

    pub fn signature(&self) -> Result<Vocabulary> {
        match self {
            SoFormula::Clausal(c) => c.signature(),
            SoFormula::Disjunction(ds) => ds.iter().try_fold(Vocabulary::default(), |acc, d| {
                acc.union(&d.signature()?)
            }),
            SoFormula::General(e) => e.signature(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SoFormula::Clausal(c) => c.validate(),
            SoFormula::Disjunction(ds) => ds.iter().try_for_each(ClausalFormula::validate),
            SoFormula::General(e) => {
                let free = e.free_vars();
                match free.into_iter().next() {
                    Some(v) => Err(Error::structural(format!("unbound variable `{v}`"))),
                    None => Ok(()),
                }
            }
        }
    }

    pub fn names(&self) -> BTreeSet<String> {
        match self {
            SoFormula::Clausal(c) => c.names(),
            SoFormula::Disjunction(ds) => ds.iter().flat_map(ClausalFormula::names).collect(),
            SoFormula::General(e) => e.names(),
        }
    }
}

impl From<ClausalFormula> for SoFormula {
    fn from(c: ClausalFormula) -> Self {
        SoFormula::Clausal(c)
    }
}

impl From<Expr> for SoFormula {
    fn from(e: Expr) -> Self {
        SoFormula::General(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_drops_true_and_false() {
        let c = Clause::new(vec![Literal::pos("P", &["x"]), Literal::Falsum]);
        assert_eq!(c.normalize(), vec![Clause::new(vec![Literal::pos("P", &["x"])])]);
        let t = Clause::new(vec![
            Literal::pos("P", &["x"]),
            Literal::eq(Term::var("x"), Term::var("x"), true),
        ]);
        assert!(t.normalize().is_empty());
        let f = Clause::new(vec![Literal::eq(Term::var("x"), Term::var("x"), false)]);
        assert_eq!(f.normalize(), vec![Clause::falsum()]);
    }

    #[test]
    fn positive_tuple_equality_distributes() {
        let c = Clause::new(vec![
            Literal::pos("P", &["x"]),
            Literal::tuple_eq(vars(&["x", "y"]), vars(&["u", "v"]), true).unwrap(),
            Literal::pos("R", &["x", "y"]),
        ]);
        let out = c.normalize();
        assert_eq!(
            out,
            vec![
                Clause::new(vec![
                    Literal::pos("P", &["x"]),
                    Literal::eq(Term::var("x"), Term::var("u"), true),
                    Literal::pos("R", &["x", "y"]),
                ]),
                Clause::new(vec![
                    Literal::pos("P", &["x"]),
                    Literal::eq(Term::var("y"), Term::var("v"), true),
                    Literal::pos("R", &["x", "y"]),
                ]),
            ]
        );
    }

    #[test]
    fn negative_tuple_equality_splits_into_disequalities() {
        let c = Clause::new(vec![
            Literal::tuple_eq(vars(&["x", "y"]), vars(&["u", "v"]), false).unwrap(),
        ]);
        assert_eq!(
            c.normalize(),
            vec![Clause::new(vec![
                Literal::eq(Term::var("x"), Term::var("u"), false),
                Literal::eq(Term::var("y"), Term::var("v"), false),
            ])]
        );
    }

    #[test]
    fn validate_catches_unbound_and_arity() {
        let f = ClausalFormula::new(
            vec![SoQuant::exists("R", 1)],
            vec!["x".into()],
            vec![Clause::new(vec![Literal::pos("R", &["x", "x"])])],
        );
        assert!(f.validate().is_err());
        let g = ClausalFormula::new(vec![], vec!["x".into()], vec![Clause::new(vec![Literal::pos("P", &["y"])])]);
        assert!(g.validate().is_err());
    }

    #[test]
    fn nnf_dualizes_so_quantifiers() {
        let e = Expr::not(Expr::so(
            Quantifier::Exists,
            "X",
            1,
            Expr::forall(vec!["x".into()], Expr::atom("X", vars(&["x"]))),
        ));
        let n = e.nnf();
        let Expr::SoQuant { quantifier, body, .. } = n else { panic!() };
        assert_eq!(quantifier, Quantifier::Forall);
        assert!(matches!(*body, Expr::Exists(..)));
    }
}
