//! Parser for `.sof` formula files.
//!
//! ```text
//! file     := decl* formula
//! decl     := 'const' IDENT '.' | 'rel' IDENT '/' INT '.'
//! formula  := clausal ('||' clausal)* | expr
//! clausal  := ['exists' IDENT+ '.'] (quant IDENT '/' INT '.')* 'all' IDENT* '.' matrix
//! quant    := 'exists2' | 'forall2'
//! matrix   := 'true' | clause ('&' clause)*
//! clause   := '(' lit ('|' lit)* ')'
//! lit      := ['~'] atom | 'some' IDENT | 'false'
//! atom     := IDENT '(' [term (',' term)*] ')' | term ('='|'!=') term
//!           | '(' term (',' term)* ')' ('='|'!=') '(' term (',' term)* ')'
//! expr     := imp ('<->' imp)*
//! imp      := or ['->' imp]
//! or       := and ('|' and)*
//! and      := unary ('&' unary)*
//! unary    := '~' unary | ('forall'|'exists') IDENT+ '.' expr
//!           | ('forall2'|'exists2') IDENT '/' INT '.' expr | primary
//! primary  := 'true' | 'false' | 'some' IDENT | '(' expr ')' | atom
//! ```
//!
//! A formula is clausal iff it contains the keyword `all`. Identifiers that
//! are not bound variables must be declared constants. If any `rel` is
//! declared, every relation symbol must be.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::logic::formula::{
    Clause, ClausalFormula, Expr, Literal, Quantifier, SoFormula, SoQuant, Term,
};
use crate::textio::lexer::{Cursor, Tok};

pub(crate) const KEYWORDS: &[&str] = &[
    "all", "exists", "forall", "exists2", "forall2", "some", "true", "false", "const", "rel",
];

pub fn parse_formula(text: &str) -> Result<SoFormula> {
    let mut p = Parser {
        cur: Cursor::new(text)?,
        constants: BTreeSet::new(),
        declared: BTreeMap::new(),
        strict: false,
        seen: BTreeMap::new(),
        fo_scope: Vec::new(),
        so_scope: Vec::new(),
    };
    p.declarations()?;
    let formula = if p.cur.contains_keyword("all") {
        let mut parts = vec![p.clausal()?];
        while p.cur.eat(&Tok::PipePipe) {
            parts.push(p.clausal()?);
        }
        if parts.len() == 1 {
            SoFormula::Clausal(parts.pop().unwrap())
        } else {
            SoFormula::Disjunction(parts)
        }
    } else {
        let e = p.expr()?;
        check_guard_polarity(&e, true)?;
        SoFormula::General(e)
    };
    if *p.cur.peek() != Tok::Eof {
        return p.cur.unexpected("end of input");
    }
    formula.validate()?;
    Ok(formula)
}

struct Parser {
    cur: Cursor,
    constants: BTreeSet<String>,
    declared: BTreeMap<String, usize>,
    strict: bool,
    /// Arity of every vocabulary relation used so far.
    seen: BTreeMap<String, usize>,
    fo_scope: Vec<String>,
    so_scope: Vec<(String, usize)>,
}

impl Parser {
    fn ident(&mut self) -> Result<String> {
        match self.cur.peek().clone() {
            Tok::Ident(s) if KEYWORDS.contains(&s.as_str()) => {
                self.cur.error(format!("keyword `{s}` used as an identifier"))
            }
            Tok::Ident(s) => {
                self.cur.next();
                Ok(s)
            }
            _ => self.cur.unexpected("an identifier"),
        }
    }

    fn is_ident(&self) -> bool {
        matches!(self.cur.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
    }

    fn declarations(&mut self) -> Result<()> {
        loop {
            if self.cur.eat_keyword("const") {
                let name = self.ident()?;
                if self.constants.contains(&name) || self.declared.contains_key(&name) {
                    return self.cur.error(format!("duplicate declaration of `{name}`"));
                }
                self.constants.insert(name);
                self.cur.expect(&Tok::Dot)?;
            } else if self.cur.eat_keyword("rel") {
                let name = self.ident()?;
                self.cur.expect(&Tok::Slash)?;
                let arity = self.cur.int()?;
                if self.constants.contains(&name) || self.declared.contains_key(&name) {
                    return self.cur.error(format!("duplicate declaration of `{name}`"));
                }
                self.declared.insert(name, arity);
                self.strict = true;
                self.cur.expect(&Tok::Dot)?;
            } else {
                return Ok(());
            }
        }
    }

    fn so_arity(&self, name: &str) -> Option<usize> {
        self.so_scope
            .iter()
            .rev()
            .find(|(n, _)| n == name)
            .map(|&(_, a)| a)
    }

    fn term(&mut self) -> Result<Term> {
        let pos = self.cur.pos();
        let name = self.ident()?;
        if self.fo_scope.contains(&name) {
            Ok(Term::Var(name))
        } else if self.constants.contains(&name) {
            Ok(Term::Const(name))
        } else {
            Err(Error::parse(pos, format!("unbound variable `{name}`")))
        }
    }

    fn terms_in_parens(&mut self) -> Result<Vec<Term>> {
        self.cur.expect(&Tok::LParen)?;
        let mut out = Vec::new();
        if self.cur.eat(&Tok::RParen) {
            return Ok(out);
        }
        loop {
            out.push(self.term()?);
            if self.cur.eat(&Tok::RParen) {
                return Ok(out);
            }
            self.cur.expect(&Tok::Comma)?;
        }
    }

    /// Checks a predicate application and records vocabulary arities.
    fn predicate(&mut self, name: &str, arity: usize) -> Result<()> {
        if let Some(a) = self.so_arity(name) {
            if a != arity {
                return self.cur.error(format!(
                    "arity mismatch: `{name}` has arity {a}, applied to {arity} arguments"
                ));
            }
            return Ok(());
        }
        if self.constants.contains(name) || self.fo_scope.iter().any(|v| v == name) {
            return self.cur.error(format!("`{name}` is not a relation"));
        }
        if self.strict && !self.declared.contains_key(name) {
            return self.cur.error(format!("undeclared relation `{name}`"));
        }
        let expected = self
            .declared
            .get(name)
            .or_else(|| self.seen.get(name))
            .copied();
        if let Some(a) = expected {
            if a != arity {
                return self.cur.error(format!(
                    "arity mismatch: `{name}` has arity {a}, applied to {arity} arguments"
                ));
            }
        }
        self.seen.insert(name.to_string(), arity);
        Ok(())
    }

    fn guard_target(&mut self) -> Result<String> {
        let pos = self.cur.pos();
        let name = self.ident()?;
        if self.so_arity(&name).is_none() {
            return Err(Error::parse(
                pos,
                format!("`some {name}`: `{name}` is not a quantified second-order variable"),
            ));
        }
        Ok(name)
    }

    fn equality_op(&mut self) -> Result<bool> {
        match self.cur.next() {
            Tok::Eq => Ok(true),
            Tok::Neq => Ok(false),
            _ => self.cur.error("expected `=` or `!=`"),
        }
    }

    /// Parses an atom and returns it as a literal with the given polarity.
    fn atom_literal(&mut self, positive: bool) -> Result<Literal> {
        if *self.cur.peek() == Tok::LParen {
            let left = self.terms_in_parens()?;
            let eq = self.equality_op()?;
            let right = self.terms_in_parens()?;
            if left.len() != right.len() || left.is_empty() {
                return self.cur.error("tuple equality needs two nonempty tuples of equal length");
            }
            return Ok(Literal::Eq {
                left,
                right,
                positive: positive == eq,
            });
        }
        if !self.is_ident() {
            return self.cur.unexpected("an atom");
        }
        if *self.cur.peek_at(1) == Tok::LParen {
            let pred = self.ident()?;
            let args = self.terms_in_parens()?;
            self.predicate(&pred, args.len())?;
            return Ok(Literal::Atom {
                pred,
                args,
                positive,
            });
        }
        let left = self.term()?;
        let eq = self.equality_op()?;
        let right = self.term()?;
        Ok(Literal::eq(left, right, positive == eq))
    }

    fn literal(&mut self) -> Result<Literal> {
        if self.cur.eat(&Tok::Tilde) {
            if self.cur.is_keyword("some") {
                return self.cur.error("negated guard `~ some` is not allowed");
            }
            if self.cur.is_keyword("false") {
                return self.cur.error("`~ false` is not a literal; drop the clause instead");
            }
            return self.atom_literal(false);
        }
        if self.cur.eat_keyword("some") {
            return Ok(Literal::Guard(self.guard_target()?));
        }
        if self.cur.eat_keyword("false") {
            return Ok(Literal::Falsum);
        }
        self.atom_literal(true)
    }

    fn clause(&mut self) -> Result<Clause> {
        self.cur.expect(&Tok::LParen)?;
        let mut lits = vec![self.literal()?];
        while self.cur.eat(&Tok::Pipe) {
            lits.push(self.literal()?);
        }
        self.cur.expect(&Tok::RParen)?;
        Ok(Clause(lits))
    }

    fn idents_until_dot(&mut self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        while !self.cur.eat(&Tok::Dot) {
            out.push(self.ident()?);
        }
        Ok(out)
    }

    fn so_binder(&mut self) -> Result<(String, usize)> {
        let name = self.ident()?;
        self.cur.expect(&Tok::Slash)?;
        let arity = self.cur.int()?;
        self.cur.expect(&Tok::Dot)?;
        if self.constants.contains(&name) || self.declared.contains_key(&name) {
            return self.cur.error(format!("`{name}` is declared as a vocabulary symbol"));
        }
        Ok((name, arity))
    }

    fn clausal(&mut self) -> Result<ClausalFormula> {
        let mark_fo = self.fo_scope.len();
        let mark_so = self.so_scope.len();
        let mut fo_exists = Vec::new();
        if self.cur.eat_keyword("exists") {
            fo_exists = self.idents_until_dot()?;
            if fo_exists.is_empty() {
                return self.cur.error("empty `exists` prefix");
            }
        }
        let mut so_prefix = Vec::new();
        loop {
            let quantifier = if self.cur.eat_keyword("exists2") {
                Quantifier::Exists
            } else if self.cur.eat_keyword("forall2") {
                Quantifier::Forall
            } else {
                break;
            };
            let (name, arity) = self.so_binder()?;
            self.so_scope.push((name.clone(), arity));
            so_prefix.push(SoQuant {
                quantifier,
                name,
                arity,
            });
        }
        if self.cur.is_keyword("exists") || self.cur.is_keyword("forall") {
            return self
                .cur
                .error("first-order quantifier before the second-order prefix ends");
        }
        self.cur.expect_keyword("all")?;
        let fo_universal = self.idents_until_dot()?;
        self.fo_scope.extend(fo_exists.iter().cloned());
        self.fo_scope.extend(fo_universal.iter().cloned());
        let mut matrix = Vec::new();
        if !self.cur.eat_keyword("true") {
            matrix.push(self.clause()?);
            while self.cur.eat(&Tok::Amp) {
                matrix.push(self.clause()?);
            }
        }
        self.fo_scope.truncate(mark_fo);
        self.so_scope.truncate(mark_so);
        Ok(ClausalFormula {
            fo_exists,
            so_prefix,
            fo_universal,
            matrix,
        })
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut parts = vec![self.implication()?];
        while self.cur.eat(&Tok::Iff) {
            parts.push(self.implication()?);
        }
        let mut acc = parts.remove(0);
        for rhs in parts {
            // a <-> b  ==  (~a | b) & (~b | a)
            acc = Expr::And(vec![
                Expr::Or(vec![Expr::not(acc.clone()), rhs.clone()]),
                Expr::Or(vec![Expr::not(rhs), acc]),
            ]);
        }
        Ok(acc)
    }

    fn implication(&mut self) -> Result<Expr> {
        let lhs = self.disjunction()?;
        if self.cur.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Expr::Or(vec![Expr::not(lhs), rhs]));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Expr> {
        let mut items = vec![self.conjunction()?];
        while self.cur.eat(&Tok::Pipe) {
            items.push(self.conjunction()?);
        }
        Ok(Expr::or(items))
    }

    fn conjunction(&mut self) -> Result<Expr> {
        let mut items = vec![self.unary()?];
        while self.cur.eat(&Tok::Amp) {
            items.push(self.unary()?);
        }
        Ok(Expr::and(items))
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.cur.eat(&Tok::Tilde) {
            if self.cur.is_keyword("some") {
                return self.cur.error("negated guard `~ some` is not allowed");
            }
            return Ok(Expr::not(self.unary()?));
        }
        for (kw, universal) in [("forall", true), ("exists", false)] {
            if self.cur.eat_keyword(kw) {
                let vars = self.idents_until_dot()?;
                if vars.is_empty() {
                    return self.cur.error(format!("`{kw}` without variables"));
                }
                let mark = self.fo_scope.len();
                self.fo_scope.extend(vars.iter().cloned());
                let body = self.expr()?;
                self.fo_scope.truncate(mark);
                let body = Box::new(body);
                return Ok(if universal {
                    Expr::Forall(vars, body)
                } else {
                    Expr::Exists(vars, body)
                });
            }
        }
        for (kw, quantifier) in [("forall2", Quantifier::Forall), ("exists2", Quantifier::Exists)] {
            if self.cur.eat_keyword(kw) {
                let (name, arity) = self.so_binder()?;
                self.so_scope.push((name.clone(), arity));
                let body = self.expr()?;
                self.so_scope.pop();
                return Ok(Expr::so(quantifier, name, arity, body));
            }
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        if self.cur.eat_keyword("true") {
            return Ok(Expr::True);
        }
        if self.cur.eat_keyword("false") {
            return Ok(Expr::False);
        }
        if self.cur.eat_keyword("some") {
            return Ok(Expr::Guard(self.guard_target()?));
        }
        if *self.cur.peek() == Tok::LParen {
            // `(x, y) = (u, v)` versus a parenthesized expression
            let tuple = matches!(self.cur.peek_at(1), Tok::Ident(_))
                && *self.cur.peek_at(2) == Tok::Comma;
            if !tuple {
                self.cur.next();
                let e = self.expr()?;
                self.cur.expect(&Tok::RParen)?;
                return Ok(e);
            }
        }
        match self.atom_literal(true)? {
            Literal::Atom { pred, args, .. } => Ok(Expr::Atom { pred, args }),
            Literal::Eq {
                left,
                right,
                positive,
            } => {
                let e = if left.len() == 1 {
                    Expr::Eq(left[0].clone(), right[0].clone())
                } else {
                    Expr::tuple_eq(&left, &right)
                };
                Ok(if positive { e } else { Expr::not(e) })
            }
            _ => unreachable!("atom_literal only yields atoms and equalities"),
        }
    }
}

/// Rejects guards under negative polarity.
fn check_guard_polarity(e: &Expr, positive: bool) -> Result<()> {
    match e {
        Expr::Guard(r) if !positive => Err(Error::structural(format!(
            "guard `some {r}` occurs negatively"
        ))),
        Expr::Not(inner) => check_guard_polarity(inner, !positive),
        Expr::And(items) | Expr::Or(items) => items
            .iter()
            .try_for_each(|i| check_guard_polarity(i, positive)),
        Expr::Forall(_, b) | Expr::Exists(_, b) => check_guard_polarity(b, positive),
        Expr::SoQuant { body, .. } => check_guard_polarity(body, positive),
        _ => Ok(()),
    }
}
