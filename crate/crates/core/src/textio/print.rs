//! Printers producing the concrete syntax accepted by [`parse_formula`].
//!
//! [`parse_formula`]: crate::textio::parse_formula

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use crate::logic::formula::{
    Clause, ClausalFormula, Expr, Literal, Quantifier, SoFormula, SoQuant, Term,
};

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

fn tuple(terms: &[Term]) -> String {
    let inner: Vec<&str> = terms.iter().map(Term::name).collect();
    format!("({})", inner.join(","))
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Literal::Atom {
                pred,
                args,
                positive,
            } => {
                let sign = if *positive { "" } else { "~" };
                write!(f, "{sign}{pred}{}", tuple(args))
            }
            Literal::Guard(r) => write!(f, "some {r}"),
            Literal::Falsum => f.write_str("false"),
            Literal::Eq {
                left,
                right,
                positive,
            } => {
                let sign = if *positive { "" } else { "~" };
                if left.len() == 1 {
                    write!(f, "{sign}{} = {}", left[0], right[0])
                } else {
                    write!(f, "{sign}{} = {}", tuple(left), tuple(right))
                }
            }
        }
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lits: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", lits.join(" | "))
    }
}

impl fmt::Display for SoQuant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kw = match self.quantifier {
            Quantifier::Exists => "exists2",
            Quantifier::Forall => "forall2",
        };
        write!(f, "{kw} {}/{}.", self.name, self.arity)
    }
}

impl fmt::Display for ClausalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.fo_exists.is_empty() {
            write!(f, "exists {}. ", self.fo_exists.join(" "))?;
        }
        for q in &self.so_prefix {
            write!(f, "{q} ")?;
        }
        if self.fo_universal.is_empty() {
            f.write_str("all.")?;
        } else {
            write!(f, "all {}.", self.fo_universal.join(" "))?;
        }
        if self.matrix.is_empty() {
            return f.write_str(" true");
        }
        for (i, c) in self.matrix.iter().enumerate() {
            if i > 0 {
                f.write_str(" &")?;
            }
            write!(f, " {c}")?;
        }
        Ok(())
    }
}

// Binding strength, loosest first: quantifiers < `|` < `&` < `~` < atoms.
fn write_expr(out: &mut String, e: &Expr, ctx: u8) {
    let level = match e {
        Expr::Forall(..) | Expr::Exists(..) | Expr::SoQuant { .. } => 0,
        Expr::Or(_) => 1,
        Expr::And(_) => 2,
        Expr::Not(_) => 3,
        _ => 4,
    };
    // quantifier bodies extend as far right as possible, so a quantifier
    // inside any operator must be parenthesized
    let paren = level < ctx || (level == 0 && ctx > 0);
    if paren {
        out.push('(');
    }
    match e {
        Expr::True => out.push_str("true"),
        Expr::False => out.push_str("false"),
        Expr::Atom { pred, args } => {
            let _ = write!(out, "{pred}{}", tuple(args));
        }
        Expr::Eq(a, b) => {
            let _ = write!(out, "{a} = {b}");
        }
        Expr::Guard(r) => {
            let _ = write!(out, "some {r}");
        }
        Expr::Not(inner) => {
            out.push('~');
            write_expr(out, inner, 3);
        }
        Expr::And(items) | Expr::Or(items) => {
            let (sep, lvl) = if matches!(e, Expr::And(_)) {
                (" & ", 2)
            } else {
                (" | ", 1)
            };
            if items.is_empty() {
                out.push_str(if lvl == 2 { "true" } else { "false" });
            }
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                // nested operators of the same kind keep their grouping
                write_expr(out, item, lvl + 1);
            }
        }
        Expr::Forall(vs, body) | Expr::Exists(vs, body) => {
            let kw = if matches!(e, Expr::Forall(..)) {
                "forall"
            } else {
                "exists"
            };
            let _ = write!(out, "{kw} {}. ", vs.join(" "));
            write_expr(out, body, 0);
        }
        Expr::SoQuant {
            quantifier,
            name,
            arity,
            body,
        } => {
            let q = SoQuant {
                quantifier: *quantifier,
                name: name.clone(),
                arity: *arity,
            };
            let _ = write!(out, "{q} ");
            write_expr(out, body, 0);
        }
    }
    if paren {
        out.push(')');
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_expr(&mut s, self, 0);
        f.write_str(&s)
    }
}

fn collect_constants(f: &SoFormula) -> BTreeSet<String> {
    fn from_literals<'a>(lits: impl Iterator<Item = &'a Literal>, out: &mut BTreeSet<String>) {
        for l in lits {
            for t in l.terms() {
                if let Term::Const(c) = t {
                    out.insert(c.clone());
                }
            }
        }
    }
    fn from_expr(e: &Expr, out: &mut BTreeSet<String>) {
        let mut add = |t: &Term| {
            if let Term::Const(c) = t {
                out.insert(c.clone());
            }
        };
        match e {
            Expr::Atom { args, .. } => args.iter().for_each(add),
            Expr::Eq(a, b) => {
                add(a);
                add(b);
            }
            Expr::Not(i) | Expr::Forall(_, i) | Expr::Exists(_, i) => from_expr(i, out),
            Expr::SoQuant { body, .. } => from_expr(body, out),
            Expr::And(items) | Expr::Or(items) => items.iter().for_each(|i| from_expr(i, out)),
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    match f {
        SoFormula::Clausal(c) => from_literals(c.matrix.iter().flat_map(|c| &c.0), &mut out),
        SoFormula::Disjunction(ds) => {
            for d in ds {
                from_literals(d.matrix.iter().flat_map(|c| &c.0), &mut out);
            }
        }
        SoFormula::General(e) => from_expr(e, &mut out),
    }
    out
}

/// Prints a formula, preceded by `const` declarations for the constants it uses.
impl fmt::Display for SoFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in collect_constants(self) {
            writeln!(f, "const {c}.")?;
        }
        match self {
            SoFormula::Clausal(c) => write!(f, "{c}"),
            SoFormula::Disjunction(ds) => {
                for (i, d) in ds.iter().enumerate() {
                    if i > 0 {
                        f.write_str("\n|| ")?;
                    }
                    write!(f, "{d}")?;
                }
                Ok(())
            }
            SoFormula::General(e) => write!(f, "{e}"),
        }
    }
}
