//! Grounding of clausal formulas against a finite structure.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eval::qbf::{GroundQbf, Matrix, QBlock};
use crate::logic::formula::{ClausalFormula, Literal, SoQuant, Term};
use crate::logic::structure::{tuple_count, tuple_index, FiniteStructure, Relation};

/// Upper bound on clause instantiations performed by a single grounding.
pub const MAX_INSTANCES: u128 = 50_000_000;

/// Bijection between propositional variables `1..=V` and ground atoms
/// `X(ā)` of the quantified second-order variables. Atoms are numbered by
/// prefix declaration order, then by tuple in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundAtomIndex {
    domain: usize,
    vars: Vec<(String, usize, u32)>,
    total: u32,
}

impl GroundAtomIndex {
    pub fn new(prefix: &[SoQuant], domain: usize) -> Result<Self> {
        let mut vars = Vec::with_capacity(prefix.len());
        let mut next: u128 = 1;
        for q in prefix {
            vars.push((q.name.clone(), q.arity, next as u32));
            next += (domain as u128).pow(q.arity as u32);
            if next > i32::MAX as u128 {
                return Err(Error::resource("ground atoms", next - 1, i32::MAX as u128));
            }
        }
        Ok(GroundAtomIndex {
            domain,
            vars,
            total: (next - 1) as u32,
        })
    }

    pub fn len(&self) -> usize {
        self.total as usize
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn domain(&self) -> usize {
        self.domain
    }

    fn entry(&self, name: &str) -> Option<&(String, usize, u32)> {
        self.vars.iter().find(|(n, _, _)| n == name)
    }

    /// Id of `name(tuple)`.
    pub fn id(&self, name: &str, tuple: &[usize]) -> Option<u32> {
        let (_, arity, base) = self.entry(name)?;
        (tuple.len() == *arity).then(|| base + tuple_index(tuple, self.domain) as u32)
    }

    /// Ids of all atoms of `name`, in row-major tuple order.
    pub fn block(&self, name: &str) -> Option<std::ops::Range<u32>> {
        let (_, arity, base) = self.entry(name)?;
        Some(*base..base + tuple_count(self.domain, *arity) as u32)
    }

    /// The atom with identifier `id`.
    pub fn atom(&self, id: u32) -> Option<(&str, Vec<usize>)> {
        let (name, arity, base) = self.vars.iter().rev().find(|(_, _, b)| *b <= id)?;
        let offset = (id - base) as usize;
        if id > self.total || offset >= tuple_count(self.domain, *arity) {
            return None;
        }
        Some((
            name,
            crate::logic::structure::index_tuple(offset, self.domain, *arity),
        ))
    }

    /// Relation extracted from an assignment (`values[id]`, index 0 unused).
    pub fn relation(&self, name: &str, values: &[bool]) -> Option<Relation> {
        let (_, arity, _) = self.entry(name)?;
        let ids = self.block(name)?;
        Some(Relation::from_bits(
            *arity,
            ids.map(|id| values[id as usize]).collect(),
        ))
    }
}

/// Instantiation strategy for the universal first-order variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GroundMode {
    /// Tuple-major over all of `A^|x̄|`: every clause once per tuple.
    #[default]
    Full,
    /// Each clause instantiated only over the variables it mentions.
    PerClause,
}

#[derive(Clone)]
enum Slot {
    Var(usize),
    Elem(usize),
}

enum CLit<'a> {
    So {
        base: u32,
        args: Vec<Slot>,
        positive: bool,
    },
    Rel {
        rel: &'a Relation,
        args: Vec<Slot>,
        positive: bool,
    },
    Eq {
        pairs: Vec<(Slot, Slot)>,
        positive: bool,
    },
    /// Nonemptiness of a quantified variable: disjunction of its atoms.
    Guard(std::ops::Range<u32>),
    Const(bool),
}

struct Compiled<'a> {
    /// Variables (indices into the instantiation vector) the clause mentions.
    vars: Vec<usize>,
    lits: Vec<CLit<'a>>,
}

fn slot(t: &Term, var_pos: &BTreeMap<&str, usize>, s: &FiniteStructure) -> Result<Slot> {
    match t {
        Term::Var(v) => var_pos
            .get(v.as_str())
            .map(|&i| Slot::Var(i))
            .ok_or_else(|| Error::structural(format!("unbound variable `{v}`"))),
        Term::Const(c) => s
            .constant(c)
            .map(Slot::Elem)
            .ok_or_else(|| Error::structural(format!("constant `{c}` is not interpreted"))),
    }
}

#[inline]
fn value(s: &Slot, env: &[usize]) -> usize {
    match s {
        Slot::Var(i) => env[*i],
        Slot::Elem(e) => *e,
    }
}

/// Grounds `formula` over `structure`. Free first-order variables listed in
/// `fixed` (typically the existential prefix) take the given elements.
pub fn ground_with(
    formula: &ClausalFormula,
    structure: &FiniteStructure,
    fixed: &BTreeMap<String, usize>,
    mode: GroundMode,
) -> Result<(GroundQbf, GroundAtomIndex)> {
    let n = structure.size();
    let index = GroundAtomIndex::new(&formula.so_prefix, n)?;
    for v in &formula.fo_exists {
        if !fixed.contains_key(v) {
            return Err(Error::structural(format!(
                "existential variable `{v}` must be fixed before grounding"
            )));
        }
    }
    // instantiation vector: fixed variables first, then the universal ones
    let mut names: Vec<&str> = fixed.keys().map(String::as_str).collect();
    names.extend(formula.fo_universal.iter().map(String::as_str));
    let var_pos: BTreeMap<&str, usize> = names.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let universal: Vec<usize> = formula
        .fo_universal
        .iter()
        .map(|v| var_pos[v.as_str()])
        .collect();
    let mut env: Vec<usize> = names.iter().map(|v| fixed.get(*v).copied().unwrap_or(0)).collect();

    let mut compiled = Vec::with_capacity(formula.matrix.len());
    for clause in &formula.matrix {
        let mut lits = Vec::with_capacity(clause.0.len());
        let mut vars = Vec::new();
        let mut note = |s: &Slot| {
            if let Slot::Var(i) = s {
                if universal.contains(i) && !vars.contains(i) {
                    vars.push(*i);
                }
            }
        };
        for lit in &clause.0 {
            let c = match lit {
                Literal::Falsum => CLit::Const(false),
                Literal::Guard(r) => match index.block(r) {
                    Some(ids) => CLit::Guard(ids),
                    None => match structure.relation(r) {
                        Some(rel) => CLit::Const(!rel.is_empty()),
                        None => {
                            return Err(Error::structural(format!(
                                "guard on unknown relation `{r}`"
                            )))
                        }
                    },
                },
                Literal::Eq {
                    left,
                    right,
                    positive,
                } => {
                    let mut pairs = Vec::with_capacity(left.len());
                    for (l, r) in left.iter().zip(right) {
                        let (a, b) = (slot(l, &var_pos, structure)?, slot(r, &var_pos, structure)?);
                        note(&a);
                        note(&b);
                        pairs.push((a, b));
                    }
                    CLit::Eq {
                        pairs,
                        positive: *positive,
                    }
                }
                Literal::Atom {
                    pred,
                    args,
                    positive,
                } => {
                    let slots = args
                        .iter()
                        .map(|t| slot(t, &var_pos, structure))
                        .collect::<Result<Vec<_>>>()?;
                    slots.iter().for_each(&mut note);
                    if let Some(q) = formula.so_var(pred) {
                        if q.arity != args.len() {
                            return Err(Error::structural(format!("arity mismatch for `{pred}`")));
                        }
                        CLit::So {
                            base: index.block(pred).unwrap().start,
                            args: slots,
                            positive: *positive,
                        }
                    } else {
                        let rel = structure.relation(pred).ok_or_else(|| {
                            Error::structural(format!("relation `{pred}` is not interpreted"))
                        })?;
                        if rel.arity() != args.len() {
                            return Err(Error::structural(format!("arity mismatch for `{pred}`")));
                        }
                        CLit::Rel {
                            rel,
                            args: slots,
                            positive: *positive,
                        }
                    }
                }
            };
            lits.push(c);
        }
        compiled.push(Compiled { vars, lits });
    }

    let instances: u128 = match mode {
        GroundMode::Full => {
            (n as u128).pow(universal.len() as u32) * compiled.len() as u128
        }
        GroundMode::PerClause => compiled
            .iter()
            .map(|c| (n as u128).pow(c.vars.len() as u32))
            .sum(),
    };
    if instances > MAX_INSTANCES {
        return Err(Error::resource("clause instantiations", instances, MAX_INSTANCES));
    }

    let mut clauses = Vec::new();
    let mut scratch = Vec::new();
    match mode {
        GroundMode::Full => {
            for_each_assignment(&universal, n, &mut env, &mut |env| {
                for c in &compiled {
                    if let Some(cl) = instantiate(c, env, n, &mut scratch) {
                        clauses.push(cl);
                    }
                }
            });
        }
        GroundMode::PerClause => {
            for c in &compiled {
                for_each_assignment(&c.vars, n, &mut env, &mut |env| {
                    if let Some(cl) = instantiate(c, env, n, &mut scratch) {
                        clauses.push(cl);
                    }
                });
            }
        }
    }

    let prefix = formula
        .blocks()
        .into_iter()
        .map(|(q, members)| QBlock {
            quantifier: q,
            vars: members
                .iter()
                .flat_map(|&i| index.block(&formula.so_prefix[i].name).unwrap())
                .collect(),
        })
        .collect();
    Ok((
        GroundQbf::new(index.len() as u32, prefix, Matrix::Cnf(clauses)),
        index,
    ))
}

/// Grounds a clausal formula without a first-order existential prefix,
/// tuple-major.
pub fn ground(
    formula: &ClausalFormula,
    structure: &FiniteStructure,
) -> Result<(GroundQbf, GroundAtomIndex)> {
    if !formula.fo_exists.is_empty() {
        return Err(Error::structural(
            "grounding needs a clausal formula without a first-order existential prefix",
        ));
    }
    ground_with(formula, structure, &BTreeMap::new(), GroundMode::Full)
}

/// Calls `f` for every assignment of `vars` (positions in `env`) over `[0,n)`,
/// in lexicographic order with the first variable most significant.
pub(crate) fn for_each_assignment(
    vars: &[usize],
    n: usize,
    env: &mut [usize],
    f: &mut impl FnMut(&[usize]),
) {
    for &v in vars {
        env[v] = 0;
    }
    loop {
        f(env);
        let mut k = vars.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            env[vars[k]] += 1;
            if env[vars[k]] < n {
                break;
            }
            env[vars[k]] = 0;
        }
    }
}

/// Ground instance of one clause, or `None` if it is satisfied by the
/// structure or tautological.
fn instantiate(c: &Compiled<'_>, env: &[usize], n: usize, scratch: &mut Vec<usize>) -> Option<Vec<i32>> {
    let mut out: Vec<i32> = Vec::new();
    for lit in &c.lits {
        match lit {
            CLit::Const(true) => return None,
            CLit::Const(false) => {}
            CLit::Eq { pairs, positive } => {
                let holds = pairs.iter().all(|(a, b)| value(a, env) == value(b, env));
                if holds == *positive {
                    return None;
                }
            }
            CLit::Rel {
                rel,
                args,
                positive,
            } => {
                scratch.clear();
                scratch.extend(args.iter().map(|s| value(s, env)));
                if rel.contains(scratch, n) == *positive {
                    return None;
                }
            }
            CLit::So {
                base,
                args,
                positive,
            } => {
                let idx = args.iter().fold(0usize, |acc, s| acc * n + value(s, env));
                let id = (*base + idx as u32) as i32;
                out.push(if *positive { id } else { -id });
            }
            CLit::Guard(ids) => out.extend(ids.clone().map(|i| i as i32)),
        }
    }
    out.sort_unstable_by_key(|l| (l.unsigned_abs(), *l < 0));
    out.dedup();
    if out.windows(2).any(|w| w[0] == -w[1]) {
        return None;
    }
    Some(out)
}
