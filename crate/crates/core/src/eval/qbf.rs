//! Quantified Boolean formulas over indexed variables and their brute-force
//! evaluation.

use crate::error::{Error, Result};
use crate::eval::limits::Limits;
use crate::logic::formula::Quantifier;

/// A propositional formula in negation normal form over variable ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Circuit {
    Const(bool),
    /// A signed variable id.
    Lit(i32),
    And(Vec<Circuit>),
    Or(Vec<Circuit>),
}

impl Circuit {
    /// Conjunction with constant folding and flattening.
    pub fn and(items: impl IntoIterator<Item = Circuit>) -> Circuit {
        let mut out = Vec::new();
        for c in items {
            match c {
                Circuit::Const(true) => {}
                Circuit::Const(false) => return Circuit::Const(false),
                Circuit::And(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Circuit::Const(true),
            1 => out.pop().unwrap(),
            _ => Circuit::And(out),
        }
    }

    pub fn or(items: impl IntoIterator<Item = Circuit>) -> Circuit {
        let mut out = Vec::new();
        for c in items {
            match c {
                Circuit::Const(false) => {}
                Circuit::Const(true) => return Circuit::Const(true),
                Circuit::Or(inner) => out.extend(inner),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Circuit::Const(false),
            1 => out.pop().unwrap(),
            _ => Circuit::Or(out),
        }
    }

    pub fn negate(&self) -> Circuit {
        match self {
            Circuit::Const(b) => Circuit::Const(!b),
            Circuit::Lit(l) => Circuit::Lit(-l),
            Circuit::And(items) => Circuit::or(items.iter().map(Circuit::negate)),
            Circuit::Or(items) => Circuit::and(items.iter().map(Circuit::negate)),
        }
    }

    /// Value under `values[id]` (index 0 unused).
    pub fn eval(&self, values: &[bool]) -> bool {
        match self {
            Circuit::Const(b) => *b,
            Circuit::Lit(l) => values[l.unsigned_abs() as usize] == (*l > 0),
            Circuit::And(items) => items.iter().all(|c| c.eval(values)),
            Circuit::Or(items) => items.iter().any(|c| c.eval(values)),
        }
    }

    /// Substitutes the variables for which `fixed[id]` is `Some`.
    pub fn restrict(&self, fixed: &[Option<bool>]) -> Circuit {
        match self {
            Circuit::Const(_) => self.clone(),
            Circuit::Lit(l) => match fixed.get(l.unsigned_abs() as usize).copied().flatten() {
                Some(v) => Circuit::Const(v == (*l > 0)),
                None => self.clone(),
            },
            Circuit::And(items) => Circuit::and(items.iter().map(|c| c.restrict(fixed))),
            Circuit::Or(items) => Circuit::or(items.iter().map(|c| c.restrict(fixed))),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Circuit::And(items) | Circuit::Or(items) => 1 + items.iter().map(Circuit::size).sum::<usize>(),
            _ => 1,
        }
    }
}

/// The matrix of a ground QBF. In CNF an empty clause is `⊥` and an empty
/// clause list is `⊤`; dually for DNF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Matrix {
    Cnf(Vec<Vec<i32>>),
    Dnf(Vec<Vec<i32>>),
    Circuit(Circuit),
}

impl Matrix {
    pub fn eval(&self, values: &[bool]) -> bool {
        let lit = |l: &i32| values[l.unsigned_abs() as usize] == (*l > 0);
        match self {
            Matrix::Cnf(cs) => cs.iter().all(|c| c.iter().any(lit)),
            Matrix::Dnf(ts) => ts.iter().any(|t| t.iter().all(lit)),
            Matrix::Circuit(c) => c.eval(values),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Matrix::Cnf(_) => "CNF",
            Matrix::Dnf(_) => "DNF",
            Matrix::Circuit(_) => "circuit",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QBlock {
    pub quantifier: Quantifier,
    pub vars: Vec<u32>,
}

/// `Q₁ B₁ ⋯ Q_k B_k . matrix` over variables `1..=num_vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundQbf {
    pub num_vars: u32,
    pub prefix: Vec<QBlock>,
    pub matrix: Matrix,
}

impl GroundQbf {
    pub fn new(num_vars: u32, prefix: Vec<QBlock>, matrix: Matrix) -> Self {
        GroundQbf {
            num_vars,
            prefix,
            matrix,
        }
    }

    /// Checks that every matrix variable is bound by exactly one block.
    pub fn validate(&self) -> Result<()> {
        let mut bound = vec![false; self.num_vars as usize + 1];
        for b in &self.prefix {
            for &v in &b.vars {
                if v == 0 || v > self.num_vars || bound[v as usize] {
                    return Err(Error::structural(format!("variable {v} bound twice or out of range")));
                }
                bound[v as usize] = true;
            }
        }
        let check = |l: i32| -> Result<()> {
            let v = l.unsigned_abs() as usize;
            if l == 0 || v > self.num_vars as usize || !bound[v] {
                return Err(Error::structural(format!("free variable {v} in matrix")));
            }
            Ok(())
        };
        match &self.matrix {
            Matrix::Cnf(cs) | Matrix::Dnf(cs) => cs.iter().flatten().try_for_each(|&l| check(l)),
            Matrix::Circuit(c) => {
                fn walk(c: &Circuit, check: &dyn Fn(i32) -> Result<()>) -> Result<()> {
                    match c {
                        Circuit::Lit(l) => check(*l),
                        Circuit::And(items) | Circuit::Or(items) => {
                            items.iter().try_for_each(|i| walk(i, check))
                        }
                        Circuit::Const(_) => Ok(()),
                    }
                }
                walk(c, &check)
            }
        }
    }
}

/// Exact truth value by exhaustive recursion over the prefix.
pub fn eval_qbf_bruteforce(qbf: &GroundQbf, limits: &Limits) -> Result<bool> {
    let order: Vec<(Quantifier, u32)> = qbf
        .prefix
        .iter()
        .flat_map(|b| b.vars.iter().map(move |&v| (b.quantifier, v)))
        .collect();
    if order.len() > limits.max_vars {
        return Err(Error::resource(
            "brute-force QBF variables",
            order.len() as u128,
            limits.max_vars as u128,
        ));
    }
    let mut values = vec![false; qbf.num_vars as usize + 1];
    Ok(recurse(&qbf.matrix, &order, &mut values))
}

fn recurse(matrix: &Matrix, order: &[(Quantifier, u32)], values: &mut [bool]) -> bool {
    let Some(&(q, v)) = order.first() else {
        return matrix.eval(values);
    };
    let rest = &order[1..];
    let mut result = q == Quantifier::Forall;
    for bit in [false, true] {
        values[v as usize] = bit;
        let r = recurse(matrix, rest, values);
        if r != result {
            result = r;
            break;
        }
    }
    values[v as usize] = false;
    result
}
