//! Direct recursive evaluation of arbitrary second-order formula trees.
//!
//! Second-order quantifiers enumerate every relation over the domain, so this
//! is only usable on very small structures; it serves as the reference
//! semantics for the other routes.

use crate::error::{Error, Result};
use crate::eval::limits::Limits;
use crate::logic::formula::{Expr, Quantifier, Term};
use crate::logic::structure::{tuple_count, tuple_index, FiniteStructure, Relation};

#[derive(Debug)]
enum Arg {
    Var(usize),
    Elem(usize),
}

#[derive(Debug)]
enum Rel<'a> {
    Fixed(&'a Relation),
    So(usize),
}

#[derive(Debug)]
enum Node<'a> {
    Const(bool),
    Atom(Rel<'a>, Vec<Arg>),
    Eq(Arg, Arg),
    Guard(Rel<'a>),
    Not(Box<Node<'a>>),
    And(Vec<Node<'a>>),
    Or(Vec<Node<'a>>),
    Fo {
        forall: bool,
        slots: Vec<usize>,
        body: Box<Node<'a>>,
    },
    So {
        forall: bool,
        slot: usize,
        arity: usize,
        atoms: usize,
        body: Box<Node<'a>>,
    },
}

struct Compiler<'a> {
    s: &'a FiniteStructure,
    limits: &'a Limits,
    fo: Vec<String>,
    so: Vec<(String, usize)>,
    fo_max: usize,
    so_max: usize,
}

impl<'a> Compiler<'a> {
    fn arg(&self, t: &Term) -> Result<Arg> {
        match t {
            Term::Var(v) => self
                .fo
                .iter()
                .rposition(|b| b == v)
                .map(Arg::Var)
                .ok_or_else(|| Error::structural(format!("unbound variable `{v}`"))),
            Term::Const(c) => self
                .s
                .constant(c)
                .map(Arg::Elem)
                .ok_or_else(|| Error::structural(format!("constant `{c}` is not interpreted"))),
        }
    }

    fn rel(&self, name: &str) -> Result<(Rel<'a>, usize)> {
        if let Some(i) = self.so.iter().rposition(|(n, _)| n == name) {
            return Ok((Rel::So(i), self.so[i].1));
        }
        let r = self
            .s
            .relation(name)
            .ok_or_else(|| Error::structural(format!("relation `{name}` is not interpreted")))?;
        Ok((Rel::Fixed(r), r.arity()))
    }

    fn compile(&mut self, e: &Expr) -> Result<Node<'a>> {
        Ok(match e {
            Expr::True => Node::Const(true),
            Expr::False => Node::Const(false),
            Expr::Atom { pred, args } => {
                let (rel, arity) = self.rel(pred)?;
                if arity != args.len() {
                    return Err(Error::structural(format!(
                        "`{pred}` has arity {arity} but is applied to {} terms",
                        args.len()
                    )));
                }
                let args = args.iter().map(|t| self.arg(t)).collect::<Result<_>>()?;
                Node::Atom(rel, args)
            }
            Expr::Eq(a, b) => Node::Eq(self.arg(a)?, self.arg(b)?),
            Expr::Guard(r) => Node::Guard(self.rel(r)?.0),
            Expr::Not(inner) => Node::Not(Box::new(self.compile(inner)?)),
            Expr::And(items) => Node::And(items.iter().map(|i| self.compile(i)).collect::<Result<_>>()?),
            Expr::Or(items) => Node::Or(items.iter().map(|i| self.compile(i)).collect::<Result<_>>()?),
            Expr::Forall(vars, body) | Expr::Exists(vars, body) => {
                let base = self.fo.len();
                self.fo.extend(vars.iter().cloned());
                self.fo_max = self.fo_max.max(self.fo.len());
                let body = self.compile(body)?;
                self.fo.truncate(base);
                Node::Fo {
                    forall: matches!(e, Expr::Forall(..)),
                    slots: (base..base + vars.len()).collect(),
                    body: Box::new(body),
                }
            }
            Expr::SoQuant {
                quantifier,
                name,
                arity,
                body,
            } => {
                let atoms = tuple_count(self.s.size(), *arity);
                self.limits.block_assignments(name, atoms)?;
                let slot = self.so.len();
                self.so.push((name.clone(), *arity));
                self.so_max = self.so_max.max(self.so.len());
                let body = self.compile(body)?;
                self.so.pop();
                Node::So {
                    forall: *quantifier == Quantifier::Forall,
                    slot,
                    arity: *arity,
                    atoms,
                    body: Box::new(body),
                }
            }
        })
    }
}

struct Env {
    n: usize,
    fo: Vec<usize>,
    so: Vec<Relation>,
    scratch: Vec<usize>,
}

impl Env {
    fn arg(&self, a: &Arg) -> usize {
        match a {
            Arg::Var(i) => self.fo[*i],
            Arg::Elem(e) => *e,
        }
    }
}

fn eval(node: &Node, env: &mut Env) -> bool {
    match node {
        Node::Const(b) => *b,
        Node::Atom(rel, args) => {
            let mut t = std::mem::take(&mut env.scratch);
            t.clear();
            t.extend(args.iter().map(|a| env.arg(a)));
            let idx = tuple_index(&t, env.n);
            env.scratch = t;
            match rel {
                Rel::Fixed(r) => r.contains_index(idx),
                Rel::So(i) => env.so[*i].contains_index(idx),
            }
        }
        Node::Eq(a, b) => env.arg(a) == env.arg(b),
        Node::Guard(rel) => match rel {
            Rel::Fixed(r) => !r.is_empty(),
            Rel::So(i) => !env.so[*i].is_empty(),
        },
        Node::Not(inner) => !eval(inner, env),
        Node::And(items) => items.iter().all(|i| eval(i, env)),
        Node::Or(items) => items.iter().any(|i| eval(i, env)),
        Node::Fo {
            forall,
            slots,
            body,
        } => {
            for &s in slots {
                env.fo[s] = 0;
            }
            loop {
                if eval(body, env) != *forall {
                    return !*forall;
                }
                // odometer over the bound slots, last slot fastest
                let mut k = slots.len();
                loop {
                    if k == 0 {
                        return *forall;
                    }
                    k -= 1;
                    let s = slots[k];
                    env.fo[s] += 1;
                    if env.fo[s] < env.n {
                        break;
                    }
                    env.fo[s] = 0;
                }
            }
        }
        Node::So {
            forall,
            slot,
            arity,
            atoms,
            body,
        } => {
            let mut bits = vec![false; *atoms];
            loop {
                env.so[*slot] = Relation::from_bits(*arity, bits.clone());
                if eval(body, env) != *forall {
                    return !*forall;
                }
                // binary counter, last atom fastest
                let mut k = bits.len();
                loop {
                    if k == 0 {
                        return *forall;
                    }
                    k -= 1;
                    bits[k] = !bits[k];
                    if bits[k] {
                        break;
                    }
                }
            }
        }
    }
}

/// Truth of a closed formula `e` in `s` by direct recursion. Every
/// second-order quantifier must fit within `limits.max_assignments`.
pub fn eval_tree(e: &Expr, s: &FiniteStructure, limits: &Limits) -> Result<bool> {
    let mut c = Compiler {
        s,
        limits,
        fo: Vec::new(),
        so: Vec::new(),
        fo_max: 0,
        so_max: 0,
    };
    let node = c.compile(e)?;
    let mut env = Env {
        n: s.size(),
        fo: vec![0; c.fo_max],
        so: vec![Relation::empty(0, 1); c.so_max],
        scratch: Vec::new(),
    };
    Ok(eval(&node, &mut env))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_formula, parse_structure};

    fn check(f: &str, s: &str) -> bool {
        let f = parse_formula(f).unwrap();
        let s = parse_structure(s).unwrap();
        eval_tree(&f.to_expr(), &s, &Limits::default()).unwrap()
    }

    #[test]
    fn first_order() {
        let cyc = "domain 3\nrel E/2 = {(0,1),(1,2),(2,0)}";
        assert!(check("forall x. exists y. E(x,y)", cyc));
        assert!(!check("exists x. E(x,x)", cyc));
        assert!(check("forall x y. E(x,y) -> ~E(y,x)", cyc));
    }

    #[test]
    fn second_order() {
        let s = "domain 2\nrel P/1 = {(0)}";
        assert!(check("exists2 X/1. forall x. X(x) <-> ~P(x)", s));
        assert!(!check("forall2 X/1. forall x. X(x)", s));
        assert!(check("exists2 X/1. some X & forall x. X(x) -> P(x)", s));
        assert!(!check("exists2 X/1. some X & forall x. X(x) -> x != x", s));
    }

    #[test]
    fn unbound_and_limits() {
        let s = parse_structure("domain 3").unwrap();
        let e = Expr::atom("E", vec![Term::var("x")]);
        assert!(eval_tree(&e, &s, &Limits::default()).is_err());
        let big = Expr::so(Quantifier::Exists, "X", 3, Expr::True);
        let limits = Limits {
            max_assignments: 1 << 20,
            ..Limits::default()
        };
        assert!(eval_tree(&big, &s, &limits).unwrap_err().is_resource());
    }
}
