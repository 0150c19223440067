use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::logic::vocab::{Vocabulary, MAX_CONST, MIN_CONST, ORDER_REL, SUCC_REL};

/// Row-major index of `tuple` in `[0,n)^tuple.len()`.
pub fn tuple_index(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &e| acc * n + e)
}

/// Inverse of [`tuple_index`].
pub fn index_tuple(mut index: usize, n: usize, arity: usize) -> Vec<usize> {
    let mut out = vec![0; arity];
    for slot in out.iter_mut().rev() {
        *slot = index % n;
        index /= n;
    }
    out
}

/// `n^arity`, the number of tuples of the given arity.
pub fn tuple_count(n: usize, arity: usize) -> usize {
    n.pow(arity as u32)
}

/// Iterator over `[0,n)^arity` in row-major order.
pub fn tuples(n: usize, arity: usize) -> impl Iterator<Item = Vec<usize>> {
    (0..tuple_count(n, arity)).map(move |i| index_tuple(i, n, arity))
}

/// A relation over `[0,n)` stored as a characteristic vector in row-major order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    arity: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(arity: usize, n: usize) -> Self {
        Relation {
            arity,
            bits: vec![false; tuple_count(n, arity)],
        }
    }

    pub fn from_bits(arity: usize, bits: Vec<bool>) -> Self {
        Relation { arity, bits }
    }

    pub fn from_tuples<'a>(
        arity: usize,
        n: usize,
        tuples: impl IntoIterator<Item = &'a [usize]>,
    ) -> Result<Self> {
        let mut rel = Relation::empty(arity, n);
        for t in tuples {
            if t.len() != arity {
                return Err(Error::structural(format!(
                    "tuple of length {} in relation of arity {arity}",
                    t.len()
                )));
            }
            if let Some(&bad) = t.iter().find(|&&e| e >= n) {
                return Err(Error::structural(format!(
                    "element {bad} out of range for domain size {n}"
                )));
            }
            rel.bits[tuple_index(t, n)] = true;
        }
        Ok(rel)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    #[inline]
    pub fn contains_index(&self, index: usize) -> bool {
        self.bits[index]
    }

    pub fn contains(&self, tuple: &[usize], n: usize) -> bool {
        self.bits[tuple_index(tuple, n)]
    }

    pub fn insert(&mut self, tuple: &[usize], n: usize) {
        self.bits[tuple_index(tuple, n)] = true;
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn len(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Member tuples in row-major order.
    pub fn tuples(&self, n: usize) -> Vec<Vec<usize>> {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| index_tuple(i, n, self.arity))
            .collect()
    }
}

/// A finite structure over the domain `{0, …, n−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteStructure {
    vocab: Vocabulary,
    size: usize,
    constants: BTreeMap<String, usize>,
    relations: BTreeMap<String, Relation>,
}

impl FiniteStructure {
    /// Builds a structure, checking that every symbol of `vocab` is interpreted
    /// exactly once and within range. Built-ins of an ordered vocabulary are
    /// synthesized and must not be supplied.
    pub fn new(
        vocab: Vocabulary,
        size: usize,
        constants: BTreeMap<String, usize>,
        mut relations: BTreeMap<String, Relation>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::structural("domain must be nonempty"));
        }
        let mut constants = constants;
        if vocab.is_ordered() {
            for builtin in [ORDER_REL, SUCC_REL] {
                if relations.contains_key(builtin) {
                    return Err(Error::structural(format!(
                        "`{builtin}` is synthesized for ordered structures"
                    )));
                }
            }
            for builtin in [MIN_CONST, MAX_CONST] {
                if constants.contains_key(builtin) {
                    return Err(Error::structural(format!(
                        "`{builtin}` is synthesized for ordered structures"
                    )));
                }
            }
            let mut leq = Relation::empty(2, size);
            let mut succ = Relation::empty(2, size);
            for a in 0..size {
                for b in a..size {
                    leq.insert(&[a, b], size);
                }
                if a + 1 < size {
                    succ.insert(&[a, a + 1], size);
                }
            }
            relations.insert(ORDER_REL.to_string(), leq);
            relations.insert(SUCC_REL.to_string(), succ);
            constants.insert(MIN_CONST.to_string(), 0);
            constants.insert(MAX_CONST.to_string(), size - 1);
        }
        for c in vocab.constants() {
            match constants.get(c) {
                None => return Err(Error::structural(format!("constant `{c}` is not interpreted"))),
                Some(&e) if e >= size => {
                    return Err(Error::structural(format!(
                        "constant `{c}` = {e} out of range for domain size {size}"
                    )))
                }
                Some(_) => {}
            }
        }
        for (r, a) in vocab.relations() {
            match relations.get(r) {
                None => return Err(Error::structural(format!("relation `{r}` is not interpreted"))),
                Some(rel) if rel.arity() != *a || rel.bits().len() != tuple_count(size, *a) => {
                    return Err(Error::structural(format!(
                        "relation `{r}` interpreted with the wrong shape"
                    )))
                }
                Some(_) => {}
            }
        }
        if let Some(extra) = constants.keys().find(|c| !vocab.has_constant(c)) {
            return Err(Error::structural(format!("constant `{extra}` is not declared")));
        }
        if let Some(extra) = relations.keys().find(|r| vocab.relation_arity(r).is_none()) {
            return Err(Error::structural(format!("relation `{extra}` is not declared")));
        }
        Ok(FiniteStructure {
            vocab,
            size,
            constants,
            relations,
        })
    }

    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn constant(&self, name: &str) -> Option<usize> {
        self.constants.get(name).copied()
    }

    pub fn relation(&self, name: &str) -> Option<&Relation> {
        self.relations.get(name)
    }

    pub fn constants(&self) -> &BTreeMap<String, usize> {
        &self.constants
    }

    pub fn relations(&self) -> &BTreeMap<String, Relation> {
        &self.relations
    }

    /// Adds (or replaces) a relation that is not part of the declared
    /// vocabulary, e.g. the current value of a second-order variable.
    pub fn expand(&self, name: &str, rel: Relation) -> FiniteStructure {
        let mut out = self.clone();
        if out.vocab.relation_arity(name).is_none() && !out.vocab.has_constant(name) {
            // arity 0 relations are not vocabulary symbols, so keep them out of the signature
            if rel.arity() > 0 {
                let _ = out.vocab.add_relation(name, rel.arity());
            }
        }
        out.relations.insert(name.to_string(), rel);
        out
    }

    /// The substructure induced on `elements` (listed in the order they should
    /// be renumbered). Constants must land inside the subset.
    pub fn induced(&self, elements: &[usize]) -> Result<FiniteStructure> {
        let mut renumber = vec![None; self.size];
        for (new, &old) in elements.iter().enumerate() {
            if old >= self.size || renumber[old].is_some() {
                return Err(Error::structural("invalid element subset"));
            }
            renumber[old] = Some(new);
        }
        let m = elements.len();
        let mut constants = BTreeMap::new();
        for (c, &e) in &self.constants {
            if self.vocab.is_builtin(c) {
                continue;
            }
            let Some(new) = renumber[e] else {
                return Err(Error::structural(format!(
                    "constant `{c}` is outside the induced subset"
                )));
            };
            constants.insert(c.clone(), new);
        }
        let mut relations = BTreeMap::new();
        for (r, rel) in &self.relations {
            if self.vocab.is_builtin(r) {
                continue;
            }
            let mut sub = Relation::empty(rel.arity(), m);
            for t in tuples(m, rel.arity()) {
                let orig: Vec<usize> = t.iter().map(|&i| elements[i]).collect();
                if rel.contains(&orig, self.size) {
                    sub.insert(&t, m);
                }
            }
            relations.insert(r.clone(), sub);
        }
        FiniteStructure::new(self.vocab.clone(), m, constants, relations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn digraph(n: usize, edges: &[[usize; 2]]) -> FiniteStructure {
        let vocab = Vocabulary::new(Vec::<&str>::new(), [("E", 2)]).unwrap();
        let rel = Relation::from_tuples(2, n, edges.iter().map(|e| &e[..])).unwrap();
        FiniteStructure::new(vocab, n, BTreeMap::new(), BTreeMap::from([("E".into(), rel)])).unwrap()
    }

    #[test]
    fn tuple_indexing_round_trips() {
        for i in 0..27 {
            assert_eq!(tuple_index(&index_tuple(i, 3, 3), 3), i);
        }
        assert_eq!(tuples(2, 2).collect::<Vec<_>>(), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(tuples(3, 0).count(), 1);
    }

    #[test]
    fn ordered_single_element() {
        let vocab = Vocabulary::default().into_ordered().unwrap();
        let s = FiniteStructure::new(vocab, 1, BTreeMap::new(), BTreeMap::new()).unwrap();
        assert_eq!(s.constant(MIN_CONST), Some(0));
        assert_eq!(s.constant(MAX_CONST), Some(0));
        assert!(s.relation(SUCC_REL).unwrap().is_empty());
        assert!(s.relation(ORDER_REL).unwrap().contains(&[0, 0], 1));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(Relation::from_tuples(2, 2, [&[0usize, 2][..]]).is_err());
    }

    #[test]
    fn induced_substructure() {
        let g = digraph(3, &[[0, 1], [1, 2], [2, 0]]);
        let sub = g.induced(&[0, 2]).unwrap();
        assert_eq!(sub.size(), 2);
        assert_eq!(sub.relation("E").unwrap().tuples(2), vec![vec![1, 0]]);
    }

    #[test]
    fn missing_symbol_rejected() {
        let vocab = Vocabulary::new(["c"], [("E", 2)]).unwrap();
        let err = FiniteStructure::new(vocab, 2, BTreeMap::new(), BTreeMap::new());
        assert!(err.is_err());
    }
}
