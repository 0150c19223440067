//! Prefixed DNF QBFs, their encoding as finite structures, and the fixed
//! Krom formula that evaluates them.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::eval::limits::Limits;
use crate::eval::qbf::{eval_qbf_bruteforce, GroundQbf, Matrix, QBlock};
use crate::logic::formula::{ClausalFormula, Clause, Literal, Quantifier, SoQuant, Term};
use crate::logic::structure::{FiniteStructure, Relation};
use crate::logic::vocab::Vocabulary;

pub const CLAUSE_REL: &str = "Clause";
pub const POS_REL: &str = "Pos";
pub const NEG_REL: &str = "Neg";

pub fn var_rel(h: usize) -> String {
    format!("Var{h}")
}

/// `Q₁x̄₁ ⋯ Q_k x̄_k (t₁ ∨ ⋯ ∨ t_m)` with alternating blocks and terms given
/// as conjunctions of signed variables `1..=names.len()`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixedDnfQbf {
    /// `names[i]` is the name of variable `i + 1`.
    pub names: Vec<String>,
    pub blocks: Vec<QBlock>,
    pub terms: Vec<Vec<i32>>,
}

impl PrefixedDnfQbf {
    /// Alternation count.
    pub fn k(&self) -> usize {
        self.blocks.len()
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn first_quantifier(&self) -> Quantifier {
        self.blocks.first().map_or(Quantifier::Exists, |b| b.quantifier)
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(Error::precondition("a prefixed QBF needs at least one block"));
        }
        if self.blocks.windows(2).any(|w| w[0].quantifier == w[1].quantifier) {
            return Err(Error::precondition("quantifier blocks must alternate"));
        }
        self.to_ground().validate()?;
        let bound: usize = self.blocks.iter().map(|b| b.vars.len()).sum();
        if bound != self.names.len() {
            return Err(Error::structural("every variable must belong to exactly one block"));
        }
        Ok(())
    }

    pub fn to_ground(&self) -> GroundQbf {
        GroundQbf::new(
            self.names.len() as u32,
            self.blocks.clone(),
            Matrix::Dnf(self.terms.clone()),
        )
    }

    pub fn eval(&self, limits: &Limits) -> Result<bool> {
        self.validate()?;
        eval_qbf_bruteforce(&self.to_ground(), limits)
    }

    /// Variables renumbered in block order and named `x1, x2, …`; literals of
    /// each term sorted by variable (positive first) and deduplicated.
    pub fn canonical(&self) -> PrefixedDnfQbf {
        let mut renumber = BTreeMap::new();
        let mut blocks = Vec::with_capacity(self.blocks.len());
        for b in &self.blocks {
            let vars = b
                .vars
                .iter()
                .map(|&v| {
                    let id = renumber.len() as u32 + 1;
                    *renumber.entry(v).or_insert(id)
                })
                .collect();
            blocks.push(QBlock {
                quantifier: b.quantifier,
                vars,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let set: BTreeSet<(u32, bool)> = t
                    .iter()
                    .map(|&l| (renumber[&l.unsigned_abs()], l < 0))
                    .collect();
                set.into_iter()
                    .map(|(v, neg)| if neg { -(v as i32) } else { v as i32 })
                    .collect()
            })
            .collect();
        PrefixedDnfQbf {
            names: (1..=renumber.len()).map(|i| format!("x{i}")).collect(),
            blocks,
            terms,
        }
    }
}

/// A QBF encoded as a structure over `{Clause/1, Var₁/1, …, Var_k/1, Pos/2,
/// Neg/2}`.
///
/// Term `i` is element `i` and variable `j` (in block order) is element
/// `j − 1`, so clause and variable elements overlap; `Clause` and `Var_h`
/// tell them apart.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbfStructureEncoding {
    pub structure: FiniteStructure,
    pub first: Quantifier,
    /// Element of each term.
    pub clause_elements: Vec<usize>,
    /// Element of each variable `1..=V` (index `v − 1`).
    pub variable_elements: Vec<usize>,
}

pub fn tau_vocabulary(k: usize) -> Vocabulary {
    let mut rels = vec![(CLAUSE_REL.to_string(), 1)];
    rels.extend((1..=k).map(|h| (var_rel(h), 1)));
    rels.push((POS_REL.to_string(), 2));
    rels.push((NEG_REL.to_string(), 2));
    Vocabulary::new(Vec::<String>::new(), rels).expect("distinct names")
}

pub fn encode_qbf(qbf: &PrefixedDnfQbf) -> Result<QbfStructureEncoding> {
    qbf.validate()?;
    let q = qbf.canonical();
    let m = q.terms.len();
    let v = q.num_vars();
    let n = m.max(v).max(2);
    let k = q.k();
    let mut rels = BTreeMap::new();
    let mut clause = Relation::empty(1, n);
    for i in 0..m {
        clause.insert(&[i], n);
    }
    rels.insert(CLAUSE_REL.to_string(), clause);
    for (h, b) in q.blocks.iter().enumerate() {
        let mut var = Relation::empty(1, n);
        for &x in &b.vars {
            var.insert(&[x as usize - 1], n);
        }
        rels.insert(var_rel(h + 1), var);
    }
    let (mut pos, mut neg) = (Relation::empty(2, n), Relation::empty(2, n));
    for (i, t) in q.terms.iter().enumerate() {
        for &l in t {
            let e = l.unsigned_abs() as usize - 1;
            if l > 0 {
                pos.insert(&[i, e], n);
            } else {
                neg.insert(&[i, e], n);
            }
        }
    }
    rels.insert(POS_REL.to_string(), pos);
    rels.insert(NEG_REL.to_string(), neg);
    Ok(QbfStructureEncoding {
        structure: FiniteStructure::new(tau_vocabulary(k), n, BTreeMap::new(), rels)?,
        first: q.first_quantifier(),
        clause_elements: (0..m).collect(),
        variable_elements: (0..v).collect(),
    })
}

/// Reads a QBF back from a τ-structure. Blocks alternate starting with
/// `first`; variables are numbered by block, then by element.
pub fn decode_structure(s: &FiniteStructure, first: Quantifier) -> Result<PrefixedDnfQbf> {
    let n = s.size();
    let rel = |name: &str| {
        s.relation(name)
            .ok_or_else(|| Error::structural(format!("τ-structure lacks `{name}`")))
    };
    let mut k = 0;
    while s.relation(&var_rel(k + 1)).is_some() {
        k += 1;
    }
    if k == 0 {
        return Err(Error::structural("τ-structure has no `Var1`"));
    }
    let (clause, pos, neg) = (rel(CLAUSE_REL)?, rel(POS_REL)?, rel(NEG_REL)?);
    let mut blocks = Vec::with_capacity(k);
    let mut elem_var: BTreeMap<usize, u32> = BTreeMap::new();
    let mut q = first;
    for h in 1..=k {
        let var = rel(&var_rel(h))?;
        let mut vars = Vec::new();
        for e in 0..n {
            if var.contains(&[e], n) {
                if elem_var.contains_key(&e) {
                    return Err(Error::structural(format!("element {e} is in two Var relations")));
                }
                let id = elem_var.len() as u32 + 1;
                elem_var.insert(e, id);
                vars.push(id);
            }
        }
        blocks.push(QBlock { quantifier: q, vars });
        q = q.dual();
    }
    let mut by_id: Vec<(u32, usize)> = elem_var.iter().map(|(&e, &v)| (v, e)).collect();
    by_id.sort_unstable();
    let mut terms = Vec::new();
    for c in (0..n).filter(|&c| clause.contains(&[c], n)) {
        let mut t = Vec::new();
        for &(v, e) in &by_id {
            if pos.contains(&[c, e], n) {
                t.push(v as i32);
            }
            if neg.contains(&[c, e], n) {
                t.push(-(v as i32));
            }
        }
        terms.push(t);
    }
    Ok(PrefixedDnfQbf {
        names: (1..=elem_var.len()).map(|i| format!("x{i}")).collect(),
        blocks,
        terms,
    })
}

pub fn decode_qbf(enc: &QbfStructureEncoding) -> Result<PrefixedDnfQbf> {
    decode_structure(&enc.structure, enc.first)
}

/// The formula `Q₁X₁ ⋯ Q_kX_k ∃Y ∀x∀y (some Y ∧ (Yx → Clause x) ∧
/// ⋀_h (Yx ∧ Pos xy ∧ Var_h y → X_h y) ∧ ⋀_h (Yx ∧ Neg xy ∧ Var_h y → ¬X_h y))`
/// with `Q₁ = ∃`: a nonempty set `Y` of terms, all satisfied.
pub fn phi_formula(k: usize) -> ClausalFormula {
    phi_formula_with(k, Quantifier::Exists)
}

pub fn phi_formula_with(k: usize, first: Quantifier) -> ClausalFormula {
    let mut prefix = Vec::with_capacity(k + 1);
    let mut q = first;
    for h in 1..=k {
        prefix.push(SoQuant {
            quantifier: q,
            name: format!("X{h}"),
            arity: 1,
        });
        q = q.dual();
    }
    prefix.push(SoQuant::exists("Y", 1));
    let (x, y) = (Term::var("x"), Term::var("y"));
    let y_x = Literal::atom("Y", vec![x.clone()], false);
    let mut matrix = vec![
        Clause(vec![Literal::Guard("Y".into())]),
        Clause(vec![y_x.clone(), Literal::atom(CLAUSE_REL, vec![x.clone()], true)]),
    ];
    for (rel, sign) in [(POS_REL, true), (NEG_REL, false)] {
        for h in 1..=k {
            matrix.push(Clause(vec![
                y_x.clone(),
                Literal::atom(rel, vec![x.clone(), y.clone()], false),
                Literal::atom(var_rel(h), vec![y.clone()], false),
                Literal::atom(format!("X{h}"), vec![y.clone()], sign),
            ]));
        }
    }
    ClausalFormula::new(prefix, vec!["x".into(), "y".into()], matrix)
}
