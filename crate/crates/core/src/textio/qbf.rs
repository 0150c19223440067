//! `.qbf` files: prefixed DNF QBFs.
//!
//! ```text
//! 2
//! e x1 x2
//! a x3
//! t x1 -x3
//! t x2
//! ```
//!
//! The first line is the number of blocks; `#` starts a comment.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::error::{Error, Pos, Result};
use crate::eval::qbf::QBlock;
use crate::hierarchy::qbf::PrefixedDnfQbf;
use crate::logic::formula::Quantifier;

pub fn parse_qbf(text: &str) -> Result<PrefixedDnfQbf> {
    let mut k: Option<usize> = None;
    let mut ids: BTreeMap<String, u32> = BTreeMap::new();
    let mut q = PrefixedDnfQbf {
        names: Vec::new(),
        blocks: Vec::new(),
        terms: Vec::new(),
    };
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let pos = Pos {
            line: i + 1,
            col: raw.len() - raw.trim_start().len() + 1,
        };
        let mut words = line.split_whitespace();
        let head = words.next().unwrap();
        if k.is_none() {
            k = Some(
                head.parse()
                    .map_err(|_| Error::parse(pos, "expected the block count"))?,
            );
            if words.next().is_some() {
                return Err(Error::parse(pos, "trailing input after the block count"));
            }
            continue;
        }
        match head {
            "e" | "a" => {
                if !q.terms.is_empty() {
                    return Err(Error::parse(pos, "block after the first term"));
                }
                let quantifier = if head == "e" {
                    Quantifier::Exists
                } else {
                    Quantifier::Forall
                };
                let mut vars = Vec::new();
                for w in words {
                    if w.starts_with('-') || w.parse::<i64>().is_ok() {
                        return Err(Error::parse(pos, format!("bad variable name `{w}`")));
                    }
                    if ids.contains_key(w) {
                        return Err(Error::parse(pos, format!("variable `{w}` bound twice")));
                    }
                    q.names.push(w.to_string());
                    let id = q.names.len() as u32;
                    ids.insert(w.to_string(), id);
                    vars.push(id);
                }
                q.blocks.push(QBlock { quantifier, vars });
            }
            "t" => {
                let mut term = Vec::new();
                for w in words {
                    let (neg, name) = match w.strip_prefix('-') {
                        Some(rest) => (true, rest),
                        None => (false, w),
                    };
                    let &id = ids
                        .get(name)
                        .ok_or_else(|| Error::parse(pos, format!("unbound variable `{name}`")))?;
                    term.push(if neg { -(id as i32) } else { id as i32 });
                }
                q.terms.push(term);
            }
            other => return Err(Error::parse(pos, format!("unexpected `{other}`"))),
        }
    }
    let Some(k) = k else {
        return Err(Error::parse(Pos { line: 1, col: 1 }, "empty QBF file"));
    };
    if k != q.blocks.len() {
        return Err(Error::parse(
            Pos { line: 1, col: 1 },
            format!("declared {k} blocks, found {}", q.blocks.len()),
        ));
    }
    q.validate().map_err(|e| match e {
        Error::Precondition(m) | Error::Structural(m) => Error::parse(Pos { line: 1, col: 1 }, m),
        other => other,
    })?;
    Ok(q)
}

pub fn print_qbf(q: &PrefixedDnfQbf) -> String {
    let mut out = format!("{}\n", q.k());
    let name = |v: u32| &q.names[v as usize - 1];
    for b in &q.blocks {
        out.push(if b.quantifier == Quantifier::Exists { 'e' } else { 'a' });
        for &v in &b.vars {
            write!(out, " {}", name(v)).unwrap();
        }
        out.push('\n');
    }
    for t in &q.terms {
        out.push('t');
        for &l in t {
            let sign = if l < 0 { "-" } else { "" };
            write!(out, " {sign}{}", name(l.unsigned_abs())).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let text = "4\ne x1\na x2\ne x3\na x4\nt x1 -x2\nt x2 -x4\nt x3 x4\n";
        let q = parse_qbf(text).unwrap();
        assert_eq!(q.k(), 4);
        assert_eq!(q.terms, vec![vec![1, -2], vec![2, -4], vec![3, 4]]);
        assert_eq!(print_qbf(&q), text);
    }

    #[test]
    fn errors() {
        assert!(parse_qbf("").is_err());
        assert!(parse_qbf("1\ne x\nt y").is_err());
        assert!(parse_qbf("2\ne x\nt x").is_err());
        assert!(parse_qbf("2\ne x\ne y\nt x").is_err());
        assert!(matches!(parse_qbf("1\ne x\nz"), Err(Error::Parse { .. })));
    }
}
