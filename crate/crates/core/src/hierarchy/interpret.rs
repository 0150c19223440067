//! The quantifier-free interpretation `Π` of the QBF vocabulary
//! `{Clause, Var₁, …, Var_k, Pos, Neg}` in `d`-tuples of a `σ`-structure.
//!
//! Positions are 1-based in the comments, matching the layout:
//!
//! ```text
//! clause:   a₁ a₂ a₃ | a₄ … a_{m+4} (selector) | a_{m+5} … (x̄) | padding = a₁
//! variable: a₁ a₂ a₃ | a₄ … a_{k+4} (selector) | a_{k+5} … (atom) | padding = a₁
//! ```
//!
//! with `a₁ ≠ a₃ = a₂` for clauses and `a₃ ≠ a₁ = a₂` for variables.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::hierarchy::intermediate::{AtomLabel, GroundIntermediate, Intermediate, TermLabel};
use crate::hierarchy::qbf::{encode_qbf, var_rel, CLAUSE_REL, NEG_REL, POS_REL};
use crate::hierarchy::qfnorm;
use crate::logic::formula::{ClausalFormula, Clause, Expr, Literal, SoQuant, Term};
use crate::logic::fresh::FreshNames;
use crate::logic::structure::FiniteStructure;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interpretation {
    pub d: usize,
    pub m: usize,
    pub x_len: usize,
    pub g: usize,
    pub k: usize,
    /// Arities of `X₁, …, X_{k+1}`.
    pub arities: Vec<usize>,
    /// Free variables of the unary formulas, and the first argument of the
    /// binary ones.
    pub v1: Vec<String>,
    /// Second argument of `π_Pos` and `π_Neg`.
    pub v2: Vec<String>,
    pub uni: Expr,
    pub clause: Expr,
    /// `π_Var₁, …, π_Var_k`.
    pub vars: Vec<Expr>,
    pub pos: Expr,
    pub neg: Expr,
}

/// `d = 3 + max(|x̄| + m + 1, g + k + 1)`.
pub fn width(x_len: usize, m: usize, g: usize, k: usize) -> usize {
    3 + (x_len + m + 1).max(g + k + 1)
}

struct Layout<'a> {
    im: &'a Intermediate,
    d: usize,
    m: usize,
    k: usize,
}

type Tuple<'t> = &'t [Term];

impl Layout<'_> {
    fn at<'t>(&self, v: Tuple<'t>, p: usize) -> &'t Term {
        &v[p - 1]
    }

    fn eq(&self, v: Tuple, p: usize, q: usize) -> Expr {
        Expr::eq(self.at(v, p).clone(), self.at(v, q).clone())
    }

    fn pad(&self, v: Tuple, from: usize) -> Expr {
        Expr::and((from..=self.d).map(|l| self.eq(v, 1, l)).collect())
    }

    /// Clause selector: `v₁ = v₄ … v_{j+4}`, `v₃ = v_{j+5} … v_{m+4}`. For
    /// `j = 0` this is the selector of `∀ȳ ¬X_{k+1}z̄ȳ`.
    fn sel(&self, v: Tuple, j: usize) -> Expr {
        Expr::and(
            (4..=self.m + 4)
                .map(|l| self.eq(v, if l <= j + 4 { 1 } else { 3 }, l))
                .collect(),
        )
    }

    /// `Var_i(v̄)`: `v₁ = v₄ … v_{i+3}`, `v₃ = v_{i+4} … v_{k+4}`.
    fn var_sel(&self, v: Tuple, i: usize) -> Expr {
        Expr::and(
            (4..=self.k + 4)
                .map(|l| self.eq(v, if l <= i + 3 { 1 } else { 3 }, l))
                .collect(),
        )
    }

    fn arity(&self, i: usize) -> usize {
        self.im.prefix[i - 1].arity
    }

    fn var_args<'t>(&self, v: Tuple<'t>, i: usize) -> &'t [Term] {
        &v[self.k + 4..self.k + 4 + self.arity(i)]
    }

    fn x_term(&self, v: Tuple, t: &Term) -> Term {
        match t {
            Term::Var(x) => {
                let idx = self.im.x.iter().position(|y| y == x).expect("variables of D_j are in x̄");
                v[self.m + 4 + idx].clone()
            }
            c => c.clone(),
        }
    }

    fn x_map(&self, v: Tuple) -> BTreeMap<String, Term> {
        self.im
            .x
            .iter()
            .enumerate()
            .map(|(i, x)| (x.clone(), v[self.m + 4 + i].clone()))
            .collect()
    }

    /// First-order part of `D_j`.
    fn alpha(&self, j: usize, v: Tuple) -> Expr {
        let lits = self.im.terms[j - 1]
            .iter()
            .filter(|l| l.relation().is_none_or(|r| self.im.so_index(r).is_none()))
            .map(Expr::from_literal)
            .collect();
        Expr::and(lits).rename_free(&self.x_map(v))
    }

    fn clause(&self, v: Tuple) -> Expr {
        let mut parts = vec![
            Expr::not(self.eq(v, 1, 3)),
            self.eq(v, 2, 3),
            self.pad(v, self.m + 5 + self.im.x.len()),
            Expr::or((0..=self.m).map(|j| self.sel(v, j)).collect()),
        ];
        // every D_j selector forces its first-order part
        for j in 1..=self.m {
            parts.push(Expr::implies(self.sel(v, j), self.alpha(j, v)));
        }
        Expr::and(parts)
    }

    fn var_shape(&self, v: Tuple) -> Vec<Expr> {
        vec![Expr::not(self.eq(v, 1, 3)), self.eq(v, 1, 2)]
    }

    /// `π_Var_i` for `i < k`; for `i = k` the `X_k` and `X_{k+1}` atoms.
    fn var(&self, v: Tuple, i: usize) -> Expr {
        let mut parts = self.var_shape(v);
        let alt = |i: usize| Expr::and(vec![self.var_sel(v, i), self.pad(v, self.k + 5 + self.arity(i))]);
        if i < self.k {
            parts.push(alt(i));
        } else {
            parts.push(Expr::or(vec![alt(self.k), alt(self.k + 1)]));
        }
        Expr::and(parts)
    }

    fn colors(&self, v1: Tuple, v2: Tuple) -> Vec<Expr> {
        vec![
            Expr::eq(self.at(v1, 1).clone(), self.at(v2, 1).clone()),
            Expr::eq(self.at(v1, 3).clone(), self.at(v2, 3).clone()),
        ]
    }

    /// `⋁ α_{D_j, X_i}` over the occurrences of the given sign.
    fn occurrences(&self, v1: Tuple, v2: Tuple, positive: bool) -> Vec<Expr> {
        let mut alts = Vec::new();
        for j in 1..=self.m {
            for i in 1..=self.k + 1 {
                let name = &self.im.prefix[i - 1].name;
                let eqs: Vec<Expr> = self.im.terms[j - 1]
                    .iter()
                    .filter_map(|l| match l {
                        Literal::Atom { pred, args, positive: p } if pred == name && *p == positive => {
                            let mapped: Vec<Term> = args.iter().map(|t| self.x_term(v1, t)).collect();
                            Some(Expr::tuple_eq(&mapped, self.var_args(v2, i)))
                        }
                        _ => None,
                    })
                    .collect();
                if eqs.is_empty() {
                    continue;
                }
                let mut parts = vec![self.clause(v1), self.sel(v1, j), self.var(v2, i.min(self.k))];
                if i >= self.k {
                    parts.push(self.var_sel(v2, i));
                }
                parts.push(Expr::or(eqs));
                alts.push(Expr::and(parts));
            }
        }
        alts
    }

    fn pos(&self, v1: Tuple, v2: Tuple) -> Expr {
        let mut parts = self.colors(v1, v2);
        parts.push(Expr::or(self.occurrences(v1, v2, true)));
        Expr::and(parts)
    }

    fn neg(&self, v1: Tuple, v2: Tuple) -> Expr {
        let mut parts = self.colors(v1, v2);
        let z: Vec<Term> = self.im.z.iter().map(|x| self.x_term(v1, &Term::var(x))).collect();
        let witness_args = &self.var_args(v2, self.k + 1)[..z.len()];
        let mut beta = vec![
            self.clause(v1),
            self.sel(v1, 0),
            self.var(v2, self.k),
            self.var_sel(v2, self.k + 1),
        ];
        beta.extend(self.colors(v1, v2));
        beta.push(Expr::tuple_eq(&z, witness_args));
        let mut alts = self.occurrences(v1, v2, false);
        alts.push(Expr::and(beta));
        parts.push(Expr::or(alts));
        Expr::and(parts)
    }
}

/// Builds `Π` for the intermediate formula.
pub fn build_interpretation(im: &Intermediate) -> Result<Interpretation> {
    let k = im.k();
    let m = im.m();
    let x_len = im.x.len();
    let g = im.arities().into_iter().max().unwrap_or(0);
    let d = width(x_len, m, g, k);
    let mut used: BTreeSet<String> = im.sigma.constants().iter().cloned().collect();
    used.extend(im.x.iter().cloned());
    let mut fresh = FreshNames::new(used);
    let v1 = fresh.fresh_many("v", d);
    let v2 = fresh.fresh_many("w", d);
    let t1: Vec<Term> = v1.iter().map(Term::var).collect();
    let t2: Vec<Term> = v2.iter().map(Term::var).collect();
    let l = Layout { im, d, m, k };
    Ok(Interpretation {
        d,
        m,
        x_len,
        g,
        k,
        arities: im.arities(),
        uni: Expr::and(t1.iter().map(|t| Expr::eq(t.clone(), t.clone())).collect()),
        clause: l.clause(&t1),
        vars: (1..=k).map(|i| l.var(&t1, i)).collect(),
        pos: l.pos(&t1, &t2),
        neg: l.neg(&t1, &t2),
        v1,
        v2,
    })
}

impl Interpretation {
    /// The defining formula of a τ-relation and its arity.
    pub fn pi(&self, rel: &str) -> Option<(&Expr, usize)> {
        if rel == CLAUSE_REL {
            return Some((&self.clause, 1));
        }
        if rel == POS_REL {
            return Some((&self.pos, 2));
        }
        if rel == NEG_REL {
            return Some((&self.neg, 2));
        }
        (1..=self.k)
            .find(|&h| var_rel(h) == rel)
            .map(|h| (&self.vars[h - 1], 1))
    }

    /// The defining formula of `rel` on the given argument tuples.
    pub fn instantiate(&self, rel: &str, args: &[&[Term]]) -> Result<Expr> {
        let (pi, arity) = self
            .pi(rel)
            .ok_or_else(|| Error::structural(format!("`{rel}` is not interpreted")))?;
        if args.len() != arity || args.iter().any(|a| a.len() != self.d) {
            return Err(Error::structural(format!("`{rel}` applied to the wrong number of terms")));
        }
        let mut map = BTreeMap::new();
        for (vars, tuple) in [&self.v1, &self.v2].into_iter().zip(args) {
            for (v, t) in vars.iter().zip(tuple.iter()) {
                map.insert(v.clone(), t.clone());
            }
        }
        Ok(pi.rename_free(&map))
    }

    /// `(j, ā)` of a clause tuple.
    pub fn clause_label(&self, t: &[usize]) -> TermLabel {
        let j = (3..self.m + 4).take_while(|&i| t[i] == t[0]).count() - 1;
        (j, t[self.m + 4..self.m + 4 + self.x_len].to_vec())
    }

    /// `(i, b̄)` of a variable tuple, with `i` 0-based.
    pub fn atom_label(&self, t: &[usize]) -> AtomLabel {
        let i = (3..self.k + 4).take_while(|&p| t[p] == t[0]).count() - 1;
        let start = self.k + 4;
        (i, t[start..start + self.arities[i]].to_vec())
    }
}

/// Evaluates a quantifier-free formula under an assignment.
pub fn eval_qf(e: &Expr, s: &FiniteStructure, env: &BTreeMap<&str, usize>) -> Result<bool> {
    let term = |t: &Term| match t {
        Term::Var(v) => env
            .get(v.as_str())
            .copied()
            .ok_or_else(|| Error::structural(format!("unbound variable `{v}`"))),
        Term::Const(c) => s
            .constant(c)
            .ok_or_else(|| Error::structural(format!("structure lacks constant `{c}`"))),
    };
    Ok(match e {
        Expr::True => true,
        Expr::False => false,
        Expr::Eq(a, b) => term(a)? == term(b)?,
        Expr::Atom { pred, args } => {
            let r = s
                .relation(pred)
                .ok_or_else(|| Error::structural(format!("structure lacks relation `{pred}`")))?;
            let vals = args.iter().map(term).collect::<Result<Vec<_>>>()?;
            r.contains(&vals, s.size())
        }
        Expr::Not(inner) => !eval_qf(inner, s, env)?,
        Expr::And(items) => {
            for i in items {
                if !eval_qf(i, s, env)? {
                    return Ok(false);
                }
            }
            true
        }
        Expr::Or(items) => {
            for i in items {
                if eval_qf(i, s, env)? {
                    return Ok(true);
                }
            }
            false
        }
        _ => return Err(Error::precondition("expected a quantifier-free formula")),
    })
}

/// The τ-structure `𝒜^Π` restricted to clause and variable tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InterpretedStructure {
    pub clauses: Vec<Vec<usize>>,
    /// Variable tuples with their block `1..=k`.
    pub variables: Vec<(usize, Vec<usize>)>,
    /// Pairs of indices into `clauses` and `variables`.
    pub pos: BTreeSet<(usize, usize)>,
    pub neg: BTreeSet<(usize, usize)>,
    /// Number of tuples satisfying `π_uni`.
    pub universe: u128,
}

impl InterpretedStructure {
    /// Tuple counts per defining formula, in the order uni, Clause,
    /// Var₁ … Var_k, Pos, Neg.
    pub fn counts(&self, k: usize) -> Vec<(String, u128)> {
        let mut out = vec![
            ("uni".to_string(), self.universe),
            (CLAUSE_REL.to_string(), self.clauses.len() as u128),
        ];
        for h in 1..=k {
            let c = self.variables.iter().filter(|(b, _)| *b == h).count();
            out.push((var_rel(h), c as u128));
        }
        out.push((POS_REL.to_string(), self.pos.len() as u128));
        out.push((NEG_REL.to_string(), self.neg.len() as u128));
        out
    }
}

/// Computes `𝒜^Π` by enumerating all of `A^d`, with at most `budget`
/// tuples. `Pos` and `Neg` are evaluated on clause × variable pairs, which
/// contain them since `π_Pos` and `π_Neg` imply `π_Clause` and some `π_Var_i`.
pub fn interpret_structure(
    interp: &Interpretation,
    s: &FiniteStructure,
    budget: u128,
) -> Result<InterpretedStructure> {
    let n = s.size();
    let universe = (n as u128).checked_pow(interp.d as u32).unwrap_or(u128::MAX);
    if universe > budget {
        return Err(Error::resource("interpretation tuples", universe, budget));
    }
    let mut clauses = Vec::new();
    let mut variables = Vec::new();
    let mut t = vec![0usize; interp.d];
    for _ in 0..universe {
        let env: BTreeMap<&str, usize> = interp.v1.iter().map(String::as_str).zip(t.iter().copied()).collect();
        if !eval_qf(&interp.uni, s, &env)? {
            return Err(Error::precondition("π_uni must hold on every tuple"));
        }
        if eval_qf(&interp.clause, s, &env)? {
            clauses.push(t.clone());
        }
        for (h, pi) in interp.vars.iter().enumerate() {
            if eval_qf(pi, s, &env)? {
                variables.push((h + 1, t.clone()));
            }
        }
        for slot in t.iter_mut().rev() {
            *slot += 1;
            if *slot < n {
                break;
            }
            *slot = 0;
        }
    }
    let mut pos = BTreeSet::new();
    let mut neg = BTreeSet::new();
    for (ci, c) in clauses.iter().enumerate() {
        for (vi, (_, v)) in variables.iter().enumerate() {
            let env: BTreeMap<&str, usize> = interp
                .v1
                .iter()
                .map(String::as_str)
                .zip(c.iter().copied())
                .chain(interp.v2.iter().map(String::as_str).zip(v.iter().copied()))
                .collect();
            if eval_qf(&interp.pos, s, &env)? {
                pos.insert((ci, vi));
            }
            if eval_qf(&interp.neg, s, &env)? {
                neg.insert((ci, vi));
            }
        }
    }
    Ok(InterpretedStructure {
        clauses,
        variables,
        pos,
        neg,
        universe,
    })
}

/// Compares `𝒜^Π` with `encode_qbf(ψ_𝒜)`. Within each color `(a₁, a₃)` the
/// clause and variable tuples must correspond one-to-one with the terms and
/// variables of `ψ_𝒜` through their labels, preserving `Var_h`, `Pos` and
/// `Neg`; no `Pos` or `Neg` pair may join two colors. Returns the
/// discrepancies found.
pub fn compare_with_encoding(
    interp: &Interpretation,
    image: &InterpretedStructure,
    ground: &GroundIntermediate,
) -> Result<Vec<String>> {
    let enc = encode_qbf(&ground.qbf)?;
    let n = enc.structure.size();
    let rel = |name: &str| enc.structure.relation(name).expect("τ relation");
    let (epos, eneg) = (rel(POS_REL), rel(NEG_REL));
    let block_of: BTreeMap<u32, usize> = ground
        .qbf
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(h, b)| b.vars.iter().map(move |&v| (v, h + 1)))
        .collect();
    let term_index: BTreeMap<&TermLabel, usize> = ground.terms.iter().enumerate().map(|(i, l)| (l, i)).collect();
    let atom_index: BTreeMap<&AtomLabel, usize> = ground.atoms.iter().enumerate().map(|(i, l)| (l, i)).collect();

    let mut problems = Vec::new();
    let color = |t: &[usize]| (t[0], t[2]);
    let mut colors: BTreeMap<(usize, usize), (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (ci, c) in image.clauses.iter().enumerate() {
        colors.entry(color(c)).or_default().0.push(ci);
    }
    for (vi, (_, v)) in image.variables.iter().enumerate() {
        colors.entry(color(v)).or_default().1.push(vi);
    }
    for (&(ci, vi), what) in image
        .pos
        .iter()
        .map(|p| (p, "Pos"))
        .chain(image.neg.iter().map(|p| (p, "Neg")))
    {
        if color(&image.clauses[ci]) != color(&image.variables[vi].1) {
            problems.push(format!("{what} joins colors: {:?} {:?}", image.clauses[ci], image.variables[vi].1));
        }
    }
    for (col, (cs, vs)) in &colors {
        let mut terms = BTreeMap::new();
        for &ci in cs {
            let label = interp.clause_label(&image.clauses[ci]);
            match term_index.get(&label) {
                Some(&t) => {
                    if terms.insert(t, ci).is_some() {
                        problems.push(format!("color {col:?}: two tuples for term {label:?}"));
                    }
                }
                None => problems.push(format!("color {col:?}: clause tuple {:?} has no term", image.clauses[ci])),
            }
        }
        if terms.len() != ground.terms.len() {
            problems.push(format!(
                "color {col:?}: {} clause tuples for {} terms",
                terms.len(),
                ground.terms.len()
            ));
        }
        let mut atoms = BTreeMap::new();
        for &vi in vs {
            let (block, tuple) = &image.variables[vi];
            let label = interp.atom_label(tuple);
            match atom_index.get(&label) {
                Some(&a) => {
                    let id = a as u32 + 1;
                    if block_of[&id] != *block {
                        problems.push(format!("color {col:?}: atom {label:?} in Var{block}"));
                    }
                    if atoms.insert(a, vi).is_some() {
                        problems.push(format!("color {col:?}: two tuples for atom {label:?}"));
                    }
                }
                None => problems.push(format!("color {col:?}: variable tuple {tuple:?} has no atom")),
            }
        }
        if atoms.len() != ground.atoms.len() {
            problems.push(format!(
                "color {col:?}: {} variable tuples for {} atoms",
                atoms.len(),
                ground.atoms.len()
            ));
        }
        for (&t, &ci) in &terms {
            for (&a, &vi) in &atoms {
                let pair = [enc.clause_elements[t], enc.variable_elements[a]];
                for (mine, theirs, what) in [(&image.pos, epos, "Pos"), (&image.neg, eneg, "Neg")] {
                    if mine.contains(&(ci, vi)) != theirs.contains(&pair, n) {
                        problems.push(format!(
                            "color {col:?}: {what} differs on term {:?}, atom {:?}",
                            ground.terms[t], ground.atoms[a]
                        ));
                    }
                }
            }
        }
    }
    Ok(problems)
}

/// Renaming of `Ψ`'s symbols for the interpreted formula.
struct Renaming {
    so: BTreeMap<String, String>,
    fo: BTreeMap<String, Vec<Term>>,
}

impl Renaming {
    fn new(psi: &ClausalFormula, interp: &Interpretation, used: &BTreeSet<String>) -> Renaming {
        let mut fresh = FreshNames::new(used.iter().cloned());
        let mut so = BTreeMap::new();
        for q in &psi.so_prefix {
            let base = q.name.replacen('X', "Z", 1);
            so.insert(q.name.clone(), fresh.claim(&base));
        }
        let mut fo = BTreeMap::new();
        for x in &psi.fo_universal {
            fo.insert(x.clone(), fresh.fresh_many(x, interp.d).into_iter().map(Term::var).collect());
        }
        Renaming { so, fo }
    }

    fn args(&self, args: &[Term]) -> Result<Vec<Term>> {
        let mut out = Vec::new();
        for a in args {
            match a {
                Term::Var(x) => out.extend(
                    self.fo
                        .get(x)
                        .ok_or_else(|| Error::structural(format!("unbound variable `{x}`")))?
                        .iter()
                        .cloned(),
                ),
                Term::Const(c) => {
                    return Err(Error::precondition(format!("constant `{c}` in the interpreted formula")))
                }
            }
        }
        Ok(out)
    }

    fn prefix(&self, psi: &ClausalFormula, d: usize) -> Vec<SoQuant> {
        psi.so_prefix
            .iter()
            .map(|q| SoQuant {
                quantifier: q.quantifier,
                name: self.so[&q.name].clone(),
                arity: q.arity * d,
            })
            .collect()
    }

    fn vars(&self, psi: &ClausalFormula) -> Vec<String> {
        psi.fo_universal
            .iter()
            .flat_map(|x| self.fo[x].iter().map(|t| t.name().to_string()))
            .collect()
    }
}

/// A literal of `Ψ` over the interpreted symbols: second-order literals are
/// renamed, τ-literals are replaced by their defining formulas.
enum Piece {
    So(Literal),
    Fo(Expr),
}

fn translate_literal(l: &Literal, r: &Renaming, interp: &Interpretation) -> Result<Piece> {
    Ok(match l {
        Literal::Guard(x) => Piece::So(Literal::Guard(
            r.so.get(x)
                .cloned()
                .ok_or_else(|| Error::structural(format!("guard on `{x}`")))?,
        )),
        Literal::Atom { pred, args, positive } => {
            if let Some(name) = r.so.get(pred) {
                Piece::So(Literal::atom(name.clone(), r.args(args)?, *positive))
            } else {
                let tuples = args.iter().map(|a| r.args(std::slice::from_ref(a))).collect::<Result<Vec<_>>>()?;
                let refs: Vec<&[Term]> = tuples.iter().map(Vec::as_slice).collect();
                let e = interp.instantiate(pred, &refs)?;
                Piece::Fo(if *positive { e } else { Expr::not(e) })
            }
        }
        Literal::Eq { left, right, positive } => {
            let e = Expr::tuple_eq(&r.args(left)?, &r.args(right)?);
            Piece::Fo(if *positive { e } else { Expr::not(e) })
        }
        Literal::Falsum => Piece::Fo(Expr::False),
    })
}

/// `Ψ^{−Π}` before normalization: each clause of `Ψ` with its τ-literals
/// replaced by their defining formulas.
pub fn interpreted_expr(psi: &ClausalFormula, interp: &Interpretation, used: &BTreeSet<String>) -> Result<Expr> {
    let r = Renaming::new(psi, interp, used);
    let mut clauses = Vec::with_capacity(psi.matrix.len());
    for c in &psi.matrix {
        let mut lits = Vec::new();
        for l in &c.0 {
            lits.push(match translate_literal(l, &r, interp)? {
                Piece::So(l) => Expr::from_literal(&l),
                Piece::Fo(e) => e,
            });
        }
        clauses.push(Expr::or(lits));
    }
    let mut body = Expr::forall(r.vars(psi), Expr::and(clauses));
    for q in r.prefix(psi, interp.d).into_iter().rev() {
        body = Expr::so(q.quantifier, q.name, q.arity, body);
    }
    Ok(body)
}

/// `Ψ^{−Π}` in clausal form: first-order variables become `d`-tuples,
/// second-order arities are multiplied by `d`, and the quantifier-free part
/// of each clause is brought into CNF next to its second-order literals.
/// `used` lists names the result must avoid.
pub fn apply_interpretation(
    psi: &ClausalFormula,
    interp: &Interpretation,
    used: &BTreeSet<String>,
) -> Result<ClausalFormula> {
    if !psi.fo_exists.is_empty() {
        return Err(Error::precondition("Ψ must be universal in its first-order part"));
    }
    for pi in [&interp.uni, &interp.clause, &interp.pos, &interp.neg]
        .into_iter()
        .chain(&interp.vars)
    {
        if !pi.is_quantifier_free() {
            return Err(Error::precondition("defining formulas must be quantifier-free"));
        }
    }
    let r = Renaming::new(psi, interp, used);
    let mut matrix = Vec::new();
    for c in &psi.matrix {
        let mut so = Vec::new();
        let mut fo = Vec::new();
        for l in &c.0 {
            match translate_literal(l, &r, interp)? {
                Piece::So(l) => so.push(l),
                Piece::Fo(e) => fo.push(e),
            }
        }
        if fo.is_empty() {
            matrix.push(Clause(so));
            continue;
        }
        for fc in qfnorm::cnf(&Expr::or(fo))? {
            let mut lits = so.clone();
            lits.extend(fc.0.into_iter().filter(|l| *l != Literal::Falsum));
            matrix.extend(Clause(lits).normalize());
        }
    }
    Ok(ClausalFormula::new(r.prefix(psi, interp.d), r.vars(psi), matrix))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::check::check_model;
    use crate::eval::limits::Limits;
    use crate::harness::enumerate::enumerate_structures;
    use crate::hierarchy::intermediate::{ground_intermediate, negate_and_skolemize};
    use crate::hierarchy::qbf::decode_structure;
    use crate::logic::classify::{classify, FragmentTag};
    use crate::logic::formula::SoFormula;
    use crate::logic::structure::Relation;
    use crate::logic::vocab::Vocabulary;
    use crate::textio::parse_formula;

    const SOURCE: &str = "exists2 X1/1. forall2 X2/1. forall x. X1(x) | X2(x) | E(x,x)";

    fn setup(src: &str) -> (Intermediate, Interpretation) {
        let im = negate_and_skolemize(&parse_formula(src).unwrap()).unwrap();
        let interp = build_interpretation(&im).unwrap();
        (im, interp)
    }

    #[test]
    fn width_formula() {
        assert_eq!(width(2, 3, 2, 2), 9);
        assert_eq!(width(0, 3, 2, 2), 3 + 5);
        let (_, interp) = setup(SOURCE);
        assert_eq!((interp.m, interp.x_len, interp.g, interp.k, interp.d), (4, 2, 1, 2, 10));
        assert!(interp.clause.is_quantifier_free() && interp.pos.is_quantifier_free());
    }

    /// The τ-structure decoded from one color of `𝒜^Π`, as a QBF.
    fn color_qbf(interp: &Interpretation, image: &InterpretedStructure, first: crate::logic::formula::Quantifier) -> bool {
        let col = (image.clauses[0][0], image.clauses[0][2]);
        let cs: Vec<usize> = (0..image.clauses.len()).filter(|&i| (image.clauses[i][0], image.clauses[i][2]) == col).collect();
        let vs: Vec<usize> = (0..image.variables.len())
            .filter(|&i| (image.variables[i].1[0], image.variables[i].1[2]) == col)
            .collect();
        let n = cs.len() + vs.len();
        let mut rels = BTreeMap::new();
        let mut clause = Relation::empty(1, n);
        for i in 0..cs.len() {
            clause.insert(&[i], n);
        }
        rels.insert(CLAUSE_REL.to_string(), clause);
        for h in 1..=interp.k {
            let mut r = Relation::empty(1, n);
            for (j, &vi) in vs.iter().enumerate() {
                if image.variables[vi].0 == h {
                    r.insert(&[cs.len() + j], n);
                }
            }
            rels.insert(var_rel(h), r);
        }
        for (name, set) in [(POS_REL, &image.pos), (NEG_REL, &image.neg)] {
            let mut r = Relation::empty(2, n);
            for (a, &ci) in cs.iter().enumerate() {
                for (b, &vi) in vs.iter().enumerate() {
                    if set.contains(&(ci, vi)) {
                        r.insert(&[a, cs.len() + b], n);
                    }
                }
            }
            rels.insert(name.to_string(), r);
        }
        let s = FiniteStructure::new(crate::hierarchy::qbf::tau_vocabulary(interp.k), n, BTreeMap::new(), rels).unwrap();
        decode_structure(&s, first).unwrap().eval(&Limits::default()).unwrap()
    }

    #[test]
    fn interpreted_structure_matches_encoding() {
        let f = parse_formula(SOURCE).unwrap();
        let (im, interp) = setup(SOURCE);
        let vocab = Vocabulary::new(Vec::<String>::new(), [("E".to_string(), 2)]).unwrap();
        for s in enumerate_structures(&vocab, 2, 1 << 8).unwrap() {
            let image = interpret_structure(&interp, &s, 1 << 13).unwrap();
            let ground = ground_intermediate(&im, &s).unwrap();
            let problems = compare_with_encoding(&interp, &image, &ground).unwrap();
            assert!(problems.is_empty(), "{s}\n{problems:#?}");
            // two colors, each a copy of ψ_𝒜
            assert_eq!(image.clauses.len(), 2 * ground.terms.len());
            let want = check_model(&f, &s).unwrap();
            assert_eq!(color_qbf(&interp, &image, im.prefix[0].quantifier), want, "{s}");
        }
    }

    #[test]
    fn witness_arguments_and_constants() {
        for src in [
            "exists2 X/1. forall2 Z/1. forall x. exists y. (E(x,y) & X(y)) | Z(x)",
            "const c. forall2 X/2. exists x. X(x,c) | ~X(c,x)",
        ] {
            let (im, interp) = setup(src);
            let vocab = parse_formula(src).unwrap().signature().unwrap();
            for s in enumerate_structures(&vocab, 2, 1 << 8).unwrap() {
                let image = interpret_structure(&interp, &s, 1 << 16).unwrap();
                let ground = ground_intermediate(&im, &s).unwrap();
                let problems = compare_with_encoding(&interp, &image, &ground).unwrap();
                assert!(problems.is_empty(), "{src} on {s}\n{problems:#?}");
            }
        }
    }

    #[test]
    fn a_wrong_interpretation_is_caught() {
        let (im, mut interp) = setup(SOURCE);
        interp.neg = Expr::False;
        let vocab = Vocabulary::new(Vec::<String>::new(), [("E".to_string(), 2)]).unwrap();
        let s = enumerate_structures(&vocab, 2, 1 << 8).unwrap().get(0);
        let image = interpret_structure(&interp, &s, 1 << 13).unwrap();
        let ground = ground_intermediate(&im, &s).unwrap();
        assert!(!compare_with_encoding(&interp, &image, &ground).unwrap().is_empty());
    }

    #[test]
    fn applied_formula_is_krom_r() {
        let (im, interp) = setup(SOURCE);
        let psi = crate::hierarchy::qbf::phi_formula_with(im.k(), im.prefix[0].quantifier);
        let used: BTreeSet<String> = ["E".to_string()].into();
        let theta = apply_interpretation(&psi, &interp, &used).unwrap();
        assert!(theta.so_prefix.iter().all(|q| q.arity == interp.d));
        assert_eq!(classify(&SoFormula::Clausal(theta.clone())).unwrap(), FragmentTag::SigmaKromR(3));
        assert!(!theta.so_prefix.iter().any(|q| q.name == "E"));
        let e = interpreted_expr(&psi, &interp, &used).unwrap();
        assert!(matches!(e, Expr::SoQuant { .. }));
    }

    /// With a toy interpretation of width 1 the clausal and unnormalized
    /// forms can be compared by evaluation.
    #[test]
    fn apply_agrees_with_substitution_at_width_one() {
        let psi = ClausalFormula::new(
            vec![SoQuant::exists("Y", 1)],
            vec!["x".into(), "y".into()],
            vec![
                Clause(vec![Literal::Guard("Y".into())]),
                Clause(vec![Literal::atom("Y", vec![Term::var("x")], false), Literal::atom(CLAUSE_REL, vec![Term::var("x")], true)]),
                Clause(vec![
                    Literal::atom("Y", vec![Term::var("x")], false),
                    Literal::atom(POS_REL, vec![Term::var("x"), Term::var("y")], false),
                    Literal::atom("Y", vec![Term::var("y")], true),
                ]),
            ],
        );
        let v = Term::var("v_1");
        let w = Term::var("w_1");
        let interp = Interpretation {
            d: 1,
            m: 0,
            x_len: 0,
            g: 0,
            k: 0,
            arities: vec![],
            v1: vec!["v_1".into()],
            v2: vec!["w_1".into()],
            uni: Expr::True,
            clause: Expr::or(vec![Expr::atom("P", vec![v.clone()]), Expr::atom("Q", vec![v.clone()])]),
            vars: vec![],
            pos: Expr::and(vec![Expr::atom("E", vec![v.clone(), w.clone()]), Expr::not(Expr::eq(v, w))]),
            neg: Expr::False,
        };
        let used: BTreeSet<String> = ["E", "P", "Q"].map(String::from).into();
        let clausal = SoFormula::Clausal(apply_interpretation(&psi, &interp, &used).unwrap());
        let general = SoFormula::General(interpreted_expr(&psi, &interp, &used).unwrap());
        let vocab = Vocabulary::new(Vec::<String>::new(), [("E".to_string(), 2), ("P".to_string(), 1), ("Q".to_string(), 1)]).unwrap();
        for n in 1..=2 {
            for s in enumerate_structures(&vocab, n, 1 << 12).unwrap() {
                assert_eq!(check_model(&clausal, &s).unwrap(), check_model(&general, &s).unwrap(), "{s}");
            }
        }
    }

    /// Θ has 20 first-order variables, too many to enumerate; compare the
    /// clausal and substituted first-order parts of every clause on sampled
    /// assignments shaped like clause and variable tuples.
    #[test]
    fn clausal_parts_agree_on_sampled_assignments() {
        use rand::{Rng, SeedableRng};
        let (im, interp) = setup(SOURCE);
        let psi = crate::hierarchy::qbf::phi_formula_with(im.k(), im.prefix[0].quantifier);
        let used: BTreeSet<String> = ["E".to_string()].into();
        let r = Renaming::new(&psi, &interp, &used);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let vocab = Vocabulary::new(Vec::<String>::new(), [("E".to_string(), 2)]).unwrap();
        let n = 3;
        let mut satisfied = 0;
        for c in &psi.matrix {
            let fo: Vec<Expr> = c
                .0
                .iter()
                .filter_map(|l| match translate_literal(l, &r, &interp).unwrap() {
                    Piece::Fo(e) => Some(e),
                    Piece::So(_) => None,
                })
                .collect();
            if fo.is_empty() {
                continue;
            }
            let original = Expr::or(fo);
            let clauses = qfnorm::cnf(&original).unwrap();
            let normalized = Expr::and(
                clauses
                    .iter()
                    .map(|c| Expr::or(c.0.iter().map(Expr::from_literal).collect()))
                    .collect(),
            );
            let space = enumerate_structures(&vocab, n, 1 << 9).unwrap();
            for _ in 0..4000 {
                let s = space.get(rng.gen_range(0..space.len()));
                let a1 = rng.gen_range(0..n);
                let a3 = (a1 + rng.gen_range(1..n)) % n;
                let mut env = BTreeMap::new();
                for x in &psi.fo_universal {
                    let (b1, b3) = if rng.gen_bool(0.8) { (a1, a3) } else { (a3, a1) };
                    for (i, v) in r.fo[x].iter().enumerate() {
                        let roll = rng.gen_range(0..20);
                        let val = match i {
                            0 => b1,
                            1 if roll < 10 => b1,
                            1 | 2 => b3,
                            _ if roll < 9 => b1,
                            _ if roll < 18 => b3,
                            _ => rng.gen_range(0..n),
                        };
                        env.insert(v.name(), val);
                    }
                }
                let want = eval_qf(&original, &s, &env).unwrap();
                if !want {
                    satisfied += 1;
                }
                assert_eq!(eval_qf(&normalized, &s, &env).unwrap(), want, "{c} on {s} with {env:?}");
            }
        }
        // the samples must reach the interesting side of the clauses
        assert!(satisfied > 100, "{satisfied}");
    }
}
