//! Equivalence testing of two formulas over all small structures.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::eval::check::Evaluator;
use crate::eval::limits::Limits;
use crate::harness::enumerate::{enumerate_structures, DEFAULT_BUDGET};
use crate::logic::formula::SoFormula;
use crate::logic::structure::FiniteStructure;
use crate::logic::vocab::Vocabulary;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub structure: FiniteStructure,
    pub lhs: bool,
    pub rhs: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    EquivalentUpTo(usize),
    Counterexample(Box<Counterexample>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivReport {
    pub verdict: Verdict,
    pub max_n: usize,
    /// Structures checked, including the counterexample if any.
    pub tested: u128,
}

impl EquivReport {
    pub fn is_equivalent(&self) -> bool {
        matches!(self.verdict, Verdict::EquivalentUpTo(_))
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match &self.verdict {
            Verdict::Counterexample(c) => Some(c),
            Verdict::EquivalentUpTo(_) => None,
        }
    }
}

/// Compares `lhs` and `rhs` on every structure over the union of their
/// vocabularies with `1 ≤ n ≤ max_n`, in enumeration order. The first
/// disagreement (smallest `n`, then smallest index) is reported.
pub fn equiv_test(lhs: &SoFormula, rhs: &SoFormula, max_n: usize) -> Result<EquivReport> {
    let vocab = lhs.signature()?.union(&rhs.signature()?)?;
    equiv_test_with(lhs, rhs, &vocab, max_n, &Limits::from_env()?, DEFAULT_BUDGET)
}

pub fn equiv_test_with(
    lhs: &SoFormula,
    rhs: &SoFormula,
    vocab: &Vocabulary,
    max_n: usize,
    limits: &Limits,
    budget: u128,
) -> Result<EquivReport> {
    let mut tested = 0u128;
    for n in 1..=max_n {
        let space = enumerate_structures(vocab, n, budget)?;
        let count = u64::try_from(space.len())
            .map_err(|_| Error::resource(format!("structures of size {n}"), space.len(), u64::MAX as u128))?;
        let found = (0..count)
            .into_par_iter()
            .map(|i| -> Result<Option<(u64, Counterexample)>> {
                let s = space.get(i as u128);
                let mut ev = Evaluator::new(*limits);
                let l = ev.check(lhs, &s)?;
                let r = ev.check(rhs, &s)?;
                Ok((l != r).then(|| {
                    (
                        i,
                        Counterexample {
                            structure: s,
                            lhs: l,
                            rhs: r,
                        },
                    )
                }))
            })
            .find_first(|r| !matches!(r, Ok(None)));
        match found {
            Some(Err(e)) => return Err(e),
            Some(Ok(Some((i, c)))) => {
                return Ok(EquivReport {
                    verdict: Verdict::Counterexample(Box::new(c)),
                    max_n,
                    tested: tested + i as u128 + 1,
                })
            }
            _ => tested += space.len(),
        }
    }
    Ok(EquivReport {
        verdict: Verdict::EquivalentUpTo(max_n),
        max_n,
        tested,
    })
}
