//! Exhaustive enumeration of labeled finite structures.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::logic::structure::{tuple_count, FiniteStructure, Relation};
use crate::logic::vocab::Vocabulary;

/// Default cap on the number of structures per domain size.
pub const DEFAULT_BUDGET: u128 = 1 << 20;

/// All structures over `vocab` with domain `{0, …, n−1}`.
///
/// Relation bits (in vocabulary order, tuples row-major) come first, then
/// constants; the last coordinate varies fastest. Built-ins of an ordered
/// vocabulary are synthesized, not enumerated.
#[derive(Debug, Clone)]
pub struct StructureSpace {
    vocab: Vocabulary,
    n: usize,
    relations: Vec<(String, usize)>,
    constants: Vec<String>,
    count: u128,
}

impl StructureSpace {
    pub fn new(vocab: &Vocabulary, n: usize, budget: u128) -> Result<Self> {
        if n == 0 {
            return Err(Error::precondition("domain size must be at least 1"));
        }
        let relations: Vec<(String, usize)> = vocab
            .relations()
            .iter()
            .filter(|(r, _)| !vocab.is_builtin(r))
            .cloned()
            .collect();
        let constants: Vec<String> = vocab
            .constants()
            .iter()
            .filter(|c| !vocab.is_builtin(c))
            .cloned()
            .collect();
        let bits: u128 = relations
            .iter()
            .map(|(_, a)| (n as u128).saturating_pow(*a as u32))
            .fold(0u128, u128::saturating_add);
        let mut count = if bits >= 127 { u128::MAX } else { 1u128 << bits };
        for _ in &constants {
            count = count.saturating_mul(n as u128);
        }
        if count > budget {
            return Err(Error::resource(format!("structures of size {n}"), count, budget));
        }
        Ok(StructureSpace {
            vocab: vocab.clone(),
            n,
            relations,
            constants,
            count,
        })
    }

    pub fn len(&self) -> u128 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// The structure with position `index` in the enumeration order.
    pub fn get(&self, index: u128) -> FiniteStructure {
        let n = self.n;
        let mut rest = index;
        let mut constants = BTreeMap::new();
        for c in self.constants.iter().rev() {
            constants.insert(c.clone(), (rest % n as u128) as usize);
            rest /= n as u128;
        }
        let mut rels: Vec<(String, Relation)> = Vec::with_capacity(self.relations.len());
        for (r, a) in self.relations.iter().rev() {
            let size = tuple_count(n, *a);
            let mut bits = vec![false; size];
            for b in bits.iter_mut().rev() {
                *b = rest & 1 == 1;
                rest >>= 1;
            }
            rels.push((r.clone(), Relation::from_bits(*a, bits)));
        }
        FiniteStructure::new(self.vocab.clone(), n, constants, rels.into_iter().collect())
            .expect("enumerated structures are well-formed")
    }

    pub fn iter(&self) -> impl Iterator<Item = FiniteStructure> + '_ {
        (0..self.count).map(move |i| self.get(i))
    }
}

impl IntoIterator for StructureSpace {
    type Item = FiniteStructure;
    type IntoIter = Box<dyn Iterator<Item = FiniteStructure>>;

    fn into_iter(self) -> Self::IntoIter {
        Box::new((0..self.count).map(move |i| self.get(i)))
    }
}

/// Every structure over `vocab` of size `n`, each exactly once, or a resource
/// error if there are more than `budget`.
pub fn enumerate_structures(vocab: &Vocabulary, n: usize, budget: u128) -> Result<StructureSpace> {
    StructureSpace::new(vocab, n, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn counts() {
        let e = Vocabulary::new(Vec::<String>::new(), [("E".to_string(), 2)]).unwrap();
        assert_eq!(enumerate_structures(&e, 2, DEFAULT_BUDGET).unwrap().into_iter().count(), 16);
        let p = Vocabulary::new(Vec::<String>::new(), [("P".to_string(), 1)]).unwrap();
        assert_eq!(enumerate_structures(&p, 1, DEFAULT_BUDGET).unwrap().into_iter().count(), 2);
        let ec = Vocabulary::new(["c"], [("E", 2)]).unwrap();
        let all: Vec<_> = enumerate_structures(&ec, 2, DEFAULT_BUDGET).unwrap().into_iter().collect();
        assert_eq!(all.len(), 32);
        let distinct: BTreeSet<String> = all.iter().map(|s| s.to_string()).collect();
        assert_eq!(distinct.len(), 32);
    }

    #[test]
    fn budget_reports_count() {
        let e = Vocabulary::new(Vec::<String>::new(), [("E".to_string(), 2)]).unwrap();
        let err = enumerate_structures(&e, 3, 100).unwrap_err();
        assert!(err.is_resource());
        assert!(err.to_string().contains("512"), "{err}");
    }

    #[test]
    fn ordered_builtins_are_not_enumerated() {
        let v = Vocabulary::new(Vec::<String>::new(), [("P".to_string(), 1)])
            .unwrap()
            .into_ordered()
            .unwrap();
        assert_eq!(enumerate_structures(&v, 3, DEFAULT_BUDGET).unwrap().len(), 8);
    }
}
