//! Grounding of prenex second-order formula trees to circuit-matrix QBFs,
//! and their evaluation by outer enumeration plus a SAT leaf.

use crate::error::{Error, Result};
use crate::eval::ground::{GroundAtomIndex, MAX_INSTANCES};
use crate::eval::limits::{Limits, Stats};
use crate::eval::qbf::{Circuit, GroundQbf, Matrix, QBlock};
use crate::eval::sat;
use crate::logic::formula::{Expr, Quantifier, SoQuant, Term};
use crate::logic::structure::{tuple_index, FiniteStructure};

struct Grounder<'a> {
    s: &'a FiniteStructure,
    index: &'a GroundAtomIndex,
    fo: Vec<(String, usize)>,
    work: u128,
}

impl Grounder<'_> {
    fn elem(&self, t: &Term) -> Result<usize> {
        match t {
            Term::Var(v) => self
                .fo
                .iter()
                .rev()
                .find(|(n, _)| n == v)
                .map(|(_, e)| *e)
                .ok_or_else(|| Error::structural(format!("unbound variable `{v}`"))),
            Term::Const(c) => self
                .s
                .constant(c)
                .ok_or_else(|| Error::structural(format!("constant `{c}` is not interpreted"))),
        }
    }

    fn tick(&mut self) -> Result<()> {
        self.work += 1;
        if self.work > MAX_INSTANCES {
            return Err(Error::resource("circuit nodes", self.work, MAX_INSTANCES));
        }
        Ok(())
    }

    fn ground(&mut self, e: &Expr, positive: bool) -> Result<Circuit> {
        self.tick()?;
        let c = match e {
            Expr::True => Circuit::Const(true),
            Expr::False => Circuit::Const(false),
            Expr::Atom { pred, args } => {
                let tuple = args.iter().map(|t| self.elem(t)).collect::<Result<Vec<_>>>()?;
                if let Some(id) = self.index.id(pred, &tuple) {
                    Circuit::Lit(id as i32)
                } else if self.index.block(pred).is_some() {
                    return Err(Error::structural(format!("arity mismatch for `{pred}`")));
                } else {
                    let r = self
                        .s
                        .relation(pred)
                        .ok_or_else(|| Error::structural(format!("relation `{pred}` is not interpreted")))?;
                    if r.arity() != tuple.len() {
                        return Err(Error::structural(format!("arity mismatch for `{pred}`")));
                    }
                    Circuit::Const(r.contains_index(tuple_index(&tuple, self.s.size())))
                }
            }
            Expr::Eq(a, b) => Circuit::Const(self.elem(a)? == self.elem(b)?),
            Expr::Guard(r) => match self.index.block(r) {
                Some(ids) => Circuit::or(ids.map(|id| Circuit::Lit(id as i32))),
                None => {
                    let rel = self
                        .s
                        .relation(r)
                        .ok_or_else(|| Error::structural(format!("relation `{r}` is not interpreted")))?;
                    Circuit::Const(!rel.is_empty())
                }
            },
            Expr::Not(inner) => return self.ground(inner, !positive),
            Expr::And(items) | Expr::Or(items) => {
                let parts = items
                    .iter()
                    .map(|i| self.ground(i, positive))
                    .collect::<Result<Vec<_>>>()?;
                // under negation the connective is dualized by De Morgan
                return Ok(if matches!(e, Expr::And(_)) == positive {
                    Circuit::and(parts)
                } else {
                    Circuit::or(parts)
                });
            }
            Expr::Forall(vars, body) | Expr::Exists(vars, body) => {
                let conj = matches!(e, Expr::Forall(..)) == positive;
                let n = self.s.size();
                let base = self.fo.len();
                self.fo.extend(vars.iter().map(|v| (v.clone(), 0)));
                let mut parts = Vec::new();
                let mut tuple = vec![0usize; vars.len()];
                loop {
                    for (k, &x) in tuple.iter().enumerate() {
                        self.fo[base + k].1 = x;
                    }
                    let c = self.ground(body, positive)?;
                    match (conj, &c) {
                        (true, Circuit::Const(false)) | (false, Circuit::Const(true)) => {
                            self.fo.truncate(base);
                            return Ok(c);
                        }
                        _ => parts.push(c),
                    }
                    let mut k = tuple.len();
                    loop {
                        if k == 0 {
                            break;
                        }
                        k -= 1;
                        tuple[k] += 1;
                        if tuple[k] < n {
                            break;
                        }
                        tuple[k] = 0;
                    }
                    if tuple.iter().all(|&x| x == 0) {
                        break;
                    }
                }
                self.fo.truncate(base);
                return Ok(if conj { Circuit::and(parts) } else { Circuit::or(parts) });
            }
            Expr::SoQuant { name, .. } => {
                return Err(Error::Unsupported(format!(
                    "second-order quantifier on `{name}` below first-order structure"
                )))
            }
        };
        Ok(if positive { c } else { c.negate() })
    }
}

/// Splits `e` into its second-order prefix and body, requiring the body to be
/// free of second-order quantifiers.
pub fn prenex_so(e: &Expr) -> Option<(Vec<SoQuant>, &Expr)> {
    let (prefix, body) = e.so_prefix();
    (!body.has_so_quantifier()).then_some((prefix, body))
}

/// Grounds a formula `Q₁X₁⋯Q_mX_m ψ` with first-order `ψ` to a QBF whose
/// matrix is a circuit over the atoms of `X₁…X_m`.
pub fn ground_expr(e: &Expr, s: &FiniteStructure) -> Result<(GroundQbf, GroundAtomIndex)> {
    let (prefix, body) = prenex_so(e)
        .ok_or_else(|| Error::Unsupported("formula is not in second-order prenex form".into()))?;
    let mut names: Vec<&str> = prefix.iter().map(|q| q.name.as_str()).collect();
    names.sort_unstable();
    if names.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Unsupported("second-order variable quantified twice".into()));
    }
    let index = GroundAtomIndex::new(&prefix, s.size())?;
    let mut g = Grounder {
        s,
        index: &index,
        fo: Vec::new(),
        work: 0,
    };
    let matrix = g.ground(body, true)?;
    let mut blocks: Vec<QBlock> = Vec::new();
    for q in &prefix {
        let ids: Vec<u32> = index.block(&q.name).unwrap().collect();
        match blocks.last_mut() {
            Some(b) if b.quantifier == q.quantifier => b.vars.extend(ids),
            _ => blocks.push(QBlock {
                quantifier: q.quantifier,
                vars: ids,
            }),
        }
    }
    Ok((
        GroundQbf::new(index.len() as u32, blocks, Matrix::Circuit(matrix)),
        index,
    ))
}

/// Evaluates a ground QBF by enumerating all blocks but the innermost and
/// deciding the innermost block with the SAT solver.
pub fn eval_qbf_search(qbf: &GroundQbf, limits: &Limits, stats: &mut Stats) -> Result<bool> {
    let circuit = match &qbf.matrix {
        Matrix::Circuit(c) => c.clone(),
        Matrix::Cnf(cs) => Circuit::and(
            cs.iter()
                .map(|c| Circuit::or(c.iter().map(|&l| Circuit::Lit(l)))),
        ),
        Matrix::Dnf(ts) => Circuit::or(
            ts.iter()
                .map(|t| Circuit::and(t.iter().map(|&l| Circuit::Lit(l)))),
        ),
    };
    let blocks: Vec<&QBlock> = qbf.prefix.iter().filter(|b| !b.vars.is_empty()).collect();
    for (i, b) in blocks.iter().enumerate() {
        if i + 1 < blocks.len() {
            limits.block_assignments(&format!("#{}", i + 1), b.vars.len())?;
        }
    }
    let mut fixed = vec![None; qbf.num_vars as usize + 1];
    search(&circuit, &blocks, qbf.num_vars, &mut fixed, stats)
}

fn search(
    c: &Circuit,
    blocks: &[&QBlock],
    num_vars: u32,
    fixed: &mut Vec<Option<bool>>,
    stats: &mut Stats,
) -> Result<bool> {
    if let Circuit::Const(b) = c {
        return Ok(*b);
    }
    let Some((first, rest)) = blocks.split_first() else {
        return Err(Error::structural("free variable in ground circuit"));
    };
    if rest.is_empty() {
        stats.sat_calls += 1;
        return Ok(match first.quantifier {
            Quantifier::Exists => {
                let (cnf, nv) = sat::tseitin(c, num_vars);
                sat::solve(nv, &cnf).is_some()
            }
            Quantifier::Forall => {
                let (cnf, nv) = sat::tseitin(&c.negate(), num_vars);
                sat::solve(nv, &cnf).is_none()
            }
        });
    }
    let forall = first.quantifier == Quantifier::Forall;
    let count = 1u64 << first.vars.len();
    for m in 0..count {
        for (k, &v) in first.vars.iter().enumerate() {
            // lexicographic: the first variable is the most significant bit
            let bit = (m >> (first.vars.len() - 1 - k)) & 1 == 1;
            fixed[v as usize] = Some(bit);
        }
        stats.assignments += 1;
        let restricted = c.restrict(fixed);
        let r = search(&restricted, rest, num_vars, fixed, stats)?;
        if r != forall {
            for &v in &first.vars {
                fixed[v as usize] = None;
            }
            return Ok(r);
        }
    }
    for &v in &first.vars {
        fixed[v as usize] = None;
    }
    Ok(forall)
}
