//! `.fst` structure files and `.voc` vocabulary files.
//!
//! ```text
//! domain 3
//! const c = 1
//! rel E/2 = {(0,1),(1,2),(2,0)}
//! ordered
//! ```

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::logic::structure::{FiniteStructure, Relation};
use crate::logic::vocab::Vocabulary;
use crate::textio::lexer::{Cursor, Tok};

pub fn parse_structure(text: &str) -> Result<FiniteStructure> {
    let mut cur = Cursor::new(text)?;
    cur.expect_keyword("domain")?;
    let n = cur.int()?;
    if n == 0 {
        return cur.error("domain must be nonempty");
    }
    let mut vocab = Vocabulary::default();
    let mut ordered = false;
    let mut constants = BTreeMap::new();
    let mut relations = BTreeMap::new();
    loop {
        if cur.eat_keyword("const") {
            let name = name(&mut cur)?;
            cur.expect(&Tok::Eq)?;
            let pos = cur.pos();
            let e = cur.int()?;
            if e >= n {
                return Err(Error::parse(pos, format!("element {e} out of range for domain {n}")));
            }
            vocab
                .add_constant(name.clone())
                .map_err(|_| Error::parse(pos, format!("duplicate declaration of `{name}`")))?;
            constants.insert(name, e);
        } else if cur.eat_keyword("rel") {
            let name = name(&mut cur)?;
            cur.expect(&Tok::Slash)?;
            let pos = cur.pos();
            let arity = cur.int()?;
            vocab.add_relation(name.clone(), arity).map_err(|e| match e {
                Error::Structural(msg) => Error::parse(pos, msg),
                other => other,
            })?;
            cur.expect(&Tok::Eq)?;
            let rel = tuple_set(&mut cur, arity, n)?;
            relations.insert(name, rel);
        } else if cur.eat_keyword("ordered") {
            if ordered {
                return cur.error("duplicate `ordered`");
            }
            ordered = true;
        } else if *cur.peek() == Tok::Eof {
            break;
        } else {
            return cur.unexpected("`const`, `rel`, `ordered` or end of input");
        }
    }
    if ordered {
        vocab = vocab.into_ordered()?;
    }
    FiniteStructure::new(vocab, n, constants, relations)
}

fn name(cur: &mut Cursor) -> Result<String> {
    match cur.next() {
        Tok::Ident(s) => Ok(s),
        _ => cur.error("expected a symbol name"),
    }
}

fn tuple_set(cur: &mut Cursor, arity: usize, n: usize) -> Result<Relation> {
    cur.expect(&Tok::LBrace)?;
    let mut rel = Relation::empty(arity, n);
    if cur.eat(&Tok::RBrace) {
        return Ok(rel);
    }
    loop {
        let pos = cur.pos();
        let mut t = Vec::with_capacity(arity);
        if cur.eat(&Tok::LParen) {
            if !cur.eat(&Tok::RParen) {
                loop {
                    t.push(cur.int()?);
                    if cur.eat(&Tok::RParen) {
                        break;
                    }
                    cur.expect(&Tok::Comma)?;
                }
            }
        } else {
            t.push(cur.int()?);
        }
        if t.len() != arity {
            return Err(Error::parse(
                pos,
                format!("tuple of length {} in relation of arity {arity}", t.len()),
            ));
        }
        if let Some(&bad) = t.iter().find(|&&e| e >= n) {
            return Err(Error::parse(pos, format!("element {bad} out of range for domain {n}")));
        }
        rel.insert(&t, n);
        if cur.eat(&Tok::RBrace) {
            return Ok(rel);
        }
        cur.expect(&Tok::Comma)?;
    }
}

/// Prints a structure in `.fst` syntax; built-ins of ordered structures
/// are replaced by the `ordered` line.
pub fn print_structure(s: &FiniteStructure) -> String {
    s.to_string()
}

impl fmt::Display for FiniteStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vocab = self.vocabulary();
        writeln!(f, "domain {}", self.size())?;
        for c in vocab.constants() {
            if !vocab.is_builtin(c) {
                writeln!(f, "const {c} = {}", self.constant(c).unwrap())?;
            }
        }
        for (r, a) in vocab.relations() {
            if vocab.is_builtin(r) {
                continue;
            }
            let rel = self.relation(r).unwrap();
            let tuples: Vec<String> = rel
                .tuples(self.size())
                .iter()
                .map(|t| {
                    let inner: Vec<String> = t.iter().map(ToString::to_string).collect();
                    format!("({})", inner.join(","))
                })
                .collect();
            writeln!(f, "rel {r}/{a} = {{{}}}", tuples.join(","))?;
        }
        if vocab.is_ordered() {
            writeln!(f, "ordered")?;
        }
        Ok(())
    }
}

/// Parses a `.voc` vocabulary file: lines `const c`, `rel E/2`, `ordered`.
pub fn parse_vocabulary(text: &str) -> Result<Vocabulary> {
    let mut cur = Cursor::new(text)?;
    let mut vocab = Vocabulary::default();
    let mut ordered = false;
    loop {
        let pos = cur.pos();
        let res = if cur.eat_keyword("const") {
            let n = name(&mut cur)?;
            vocab.add_constant(n)
        } else if cur.eat_keyword("rel") {
            let n = name(&mut cur)?;
            cur.expect(&Tok::Slash)?;
            let arity = cur.int()?;
            vocab.add_relation(n, arity)
        } else if cur.eat_keyword("ordered") {
            ordered = true;
            Ok(())
        } else if *cur.peek() == Tok::Eof {
            break;
        } else {
            return cur.unexpected("`const`, `rel` or `ordered`");
        };
        res.map_err(|e| match e {
            Error::Structural(msg) => Error::parse(pos, msg),
            other => other,
        })?;
    }
    if ordered {
        vocab = vocab.into_ordered()?;
    }
    Ok(vocab)
}
