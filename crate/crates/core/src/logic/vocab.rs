use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

/// Name of the built-in linear order on ordered vocabularies.
pub const ORDER_REL: &str = "LEQ";
/// Name of the built-in successor relation on ordered vocabularies.
pub const SUCC_REL: &str = "SUCC";
pub const MIN_CONST: &str = "min";
pub const MAX_CONST: &str = "max";

/// A relational signature. Identity is implicit and never declared.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    constants: Vec<String>,
    relations: Vec<(String, usize)>,
    ordered: bool,
}

impl Vocabulary {
    pub fn new<C, R, S>(constants: C, relations: R) -> Result<Self>
    where
        C: IntoIterator<Item = S>,
        R: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut vocab = Vocabulary::default();
        for c in constants {
            vocab.add_constant(c)?;
        }
        for (r, arity) in relations {
            vocab.add_relation(r, arity)?;
        }
        Ok(vocab)
    }

    /// A vocabulary with the built-ins `LEQ/2`, `SUCC/2`, `min`, `max` added.
    pub fn into_ordered(mut self) -> Result<Self> {
        if self.ordered {
            return Ok(self);
        }
        self.add_relation(ORDER_REL, 2)?;
        self.add_relation(SUCC_REL, 2)?;
        self.add_constant(MIN_CONST)?;
        self.add_constant(MAX_CONST)?;
        self.ordered = true;
        Ok(self)
    }

    pub fn add_constant(&mut self, name: impl Into<String>) -> Result<()> {
        let name = name.into();
        if self.contains(&name) {
            return Err(Error::structural(format!("duplicate symbol `{name}`")));
        }
        self.constants.push(name);
        Ok(())
    }

    pub fn add_relation(&mut self, name: impl Into<String>, arity: usize) -> Result<()> {
        let name = name.into();
        if arity == 0 {
            return Err(Error::structural(format!(
                "relation `{name}` must have arity at least 1"
            )));
        }
        if self.contains(&name) {
            return Err(Error::structural(format!("duplicate symbol `{name}`")));
        }
        self.relations.push((name, arity));
        Ok(())
    }

    pub fn contains(&self, name: &str) -> bool {
        self.has_constant(name) || self.relation_arity(name).is_some()
    }

    pub fn has_constant(&self, name: &str) -> bool {
        self.constants.iter().any(|c| c == name)
    }

    pub fn relation_arity(&self, name: &str) -> Option<usize> {
        self.relations
            .iter()
            .find(|(r, _)| r == name)
            .map(|&(_, a)| a)
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relations(&self) -> &[(String, usize)] {
        &self.relations
    }

    pub fn is_ordered(&self) -> bool {
        self.ordered
    }

    /// Whether `name` is one of the symbols synthesized for ordered vocabularies.
    pub fn is_builtin(&self, name: &str) -> bool {
        self.ordered && [ORDER_REL, SUCC_REL, MIN_CONST, MAX_CONST].contains(&name)
    }

    /// Union of two vocabularies; symbols present in both must agree on kind and arity.
    pub fn union(&self, other: &Vocabulary) -> Result<Vocabulary> {
        let mut out = self.clone();
        for c in &other.constants {
            if out.has_constant(c) {
                continue;
            }
            out.add_constant(c.clone())?;
        }
        for (r, a) in &other.relations {
            match out.relation_arity(r) {
                Some(existing) if existing == *a => {}
                Some(existing) => {
                    return Err(Error::structural(format!(
                        "relation `{r}` used with arities {existing} and {a}"
                    )))
                }
                None => out.add_relation(r.clone(), *a)?,
            }
        }
        out.ordered |= other.ordered;
        Ok(out)
    }

    pub fn names(&self) -> BTreeSet<&str> {
        self.constants
            .iter()
            .map(String::as_str)
            .chain(self.relations.iter().map(|(r, _)| r.as_str()))
            .collect()
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.constants {
            if !self.is_builtin(c) {
                writeln!(f, "const {c}")?;
            }
        }
        for (r, a) in &self.relations {
            if !self.is_builtin(r) {
                writeln!(f, "rel {r}/{a}")?;
            }
        }
        if self.ordered {
            writeln!(f, "ordered")?;
        }
        Ok(())
    }
}
