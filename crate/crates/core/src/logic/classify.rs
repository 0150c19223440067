use std::fmt;

use crate::error::{Error, Result};
use crate::logic::formula::{ClausalFormula, Literal, Quantifier, SoFormula};

/// Syntactic fragment of a formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FragmentTag {
    /// No second-order quantifiers: `∀x̄ (C₁ ∧ ⋯ ∧ Cₙ)`.
    FoUniversalCnf,
    SigmaKrom(usize),
    PiKrom(usize),
    SigmaKromR(usize),
    PiKromR(usize),
    /// `∀X₁∃Y₁⋯∀X_k∃Y_k` with at most two `Y` literals per clause.
    SoEkrom,
    /// Containment target only; [`classify`] never produces it.
    Pi12Ekrom,
    /// A clausal formula under a first-order existential prefix.
    FoExists(Box<FragmentTag>),
    /// A top-level disjunction of clausal formulas, each in `inner` (possibly
    /// under a first-order existential prefix when `fo_exists` is set).
    Disjunction {
        inner: Box<FragmentTag>,
        fo_exists: bool,
    },
    GeneralSo,
}

impl FragmentTag {
    /// `(starts existential, alternation count, uses guards)` for the
    /// prefix-classified Krom tags.
    fn krom_shape(&self) -> Option<(Quantifier, usize, bool)> {
        match *self {
            FragmentTag::SigmaKrom(k) => Some((Quantifier::Exists, k, false)),
            FragmentTag::PiKrom(k) => Some((Quantifier::Forall, k, false)),
            FragmentTag::SigmaKromR(k) => Some((Quantifier::Exists, k, true)),
            FragmentTag::PiKromR(k) => Some((Quantifier::Forall, k, true)),
            _ => None,
        }
    }

    fn from_shape(q: Quantifier, k: usize, guarded: bool) -> FragmentTag {
        match (q, guarded) {
            (Quantifier::Exists, false) => FragmentTag::SigmaKrom(k),
            (Quantifier::Forall, false) => FragmentTag::PiKrom(k),
            (Quantifier::Exists, true) => FragmentTag::SigmaKromR(k),
            (Quantifier::Forall, true) => FragmentTag::PiKromR(k),
        }
    }

    /// Whether the tag belongs to the Krom family (KROM or KROM^r, or
    /// first-order universal CNF as the degenerate case).
    pub fn is_krom_family(&self) -> bool {
        matches!(self, FragmentTag::FoUniversalCnf) || self.krom_shape().is_some()
    }

    /// Smallest prefix-classified tag containing every tag in `tags`.
    fn join(tags: &[FragmentTag]) -> Option<FragmentTag> {
        let mut guarded = false;
        let mut shapes = Vec::new();
        for t in tags {
            match t {
                FragmentTag::FoUniversalCnf => {}
                other => {
                    let (q, k, g) = other.krom_shape()?;
                    guarded |= g;
                    shapes.push((q, k));
                }
            }
        }
        if shapes.is_empty() {
            return Some(FragmentTag::FoUniversalCnf);
        }
        // Σ_k fits into Σ_j for j ≥ k and into Π_j for j ≥ k+1 (dually for Π_k).
        let need = |target: Quantifier| {
            shapes
                .iter()
                .map(|&(q, k)| if q == target { k } else { k + 1 })
                .max()
                .unwrap()
        };
        let (sigma, pi) = (need(Quantifier::Exists), need(Quantifier::Forall));
        let (q, k) = if sigma <= pi {
            (Quantifier::Exists, sigma)
        } else {
            (Quantifier::Forall, pi)
        };
        Some(FragmentTag::from_shape(q, k, guarded))
    }
}

fn subscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).unwrap() as usize])
        .collect()
}

impl fmt::Display for FragmentTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FragmentTag::FoUniversalCnf => write!(f, "FO-universal-CNF"),
            FragmentTag::SigmaKrom(k) => write!(f, "Σ¹{}-KROM", subscript(*k)),
            FragmentTag::PiKrom(k) => write!(f, "Π¹{}-KROM", subscript(*k)),
            FragmentTag::SigmaKromR(k) => write!(f, "Σ¹{}-KROM^r", subscript(*k)),
            FragmentTag::PiKromR(k) => write!(f, "Π¹{}-KROM^r", subscript(*k)),
            FragmentTag::SoEkrom => write!(f, "SO-EKROM"),
            FragmentTag::Pi12Ekrom => write!(f, "Π¹₂-EKROM"),
            FragmentTag::FoExists(inner) => write!(f, "∃FO {inner}"),
            FragmentTag::Disjunction { inner, fo_exists } => {
                if *fo_exists {
                    write!(f, "disjunction of ∃FO {inner}")
                } else {
                    write!(f, "disjunction of {inner}")
                }
            }
            FragmentTag::GeneralSo => write!(f, "general SO"),
        }
    }
}

/// Classifies a clausal formula, ignoring its first-order existential prefix.
pub fn classify_matrix(formula: &ClausalFormula) -> Result<FragmentTag> {
    for lit in formula.matrix.iter().flat_map(|c| &c.0) {
        if let Literal::Guard(r) = lit {
            if !formula.is_so_var(r) {
                return Err(Error::structural(format!(
                    "guard on `{r}`, which is not a quantified second-order variable"
                )));
            }
        }
    }
    let blocks = formula.blocks();
    if blocks.is_empty() {
        return Ok(FragmentTag::FoUniversalCnf);
    }
    let guarded = formula.has_guards();
    let krom = formula
        .matrix
        .iter()
        .all(|c| formula.so_literal_count(c) <= 2);
    if krom {
        return Ok(FragmentTag::from_shape(blocks[0].0, blocks.len(), guarded));
    }
    let ekrom_prefix = blocks[0].0 == Quantifier::Forall && blocks.len() % 2 == 0;
    if ekrom_prefix && !guarded {
        let y_literals = |c: &crate::logic::formula::Clause| {
            c.0.iter()
                .filter(|l| {
                    l.relation()
                        .and_then(|r| formula.so_var(r))
                        .is_some_and(|q| q.quantifier == Quantifier::Exists)
                })
                .count()
        };
        if formula.matrix.iter().all(|c| y_literals(c) <= 2) {
            return Ok(FragmentTag::SoEkrom);
        }
    }
    Ok(FragmentTag::GeneralSo)
}

/// The most specific fragment tag of `formula`. Purely syntactic.
pub fn classify(formula: &SoFormula) -> Result<FragmentTag> {
    match formula {
        SoFormula::Clausal(c) => {
            let tag = classify_matrix(c)?;
            if c.fo_exists.is_empty() {
                Ok(tag)
            } else {
                Ok(FragmentTag::FoExists(Box::new(tag)))
            }
        }
        SoFormula::Disjunction(ds) => {
            let tags = ds.iter().map(classify_matrix).collect::<Result<Vec<_>>>()?;
            let fo_exists = ds.iter().any(|d| !d.fo_exists.is_empty());
            Ok(match FragmentTag::join(&tags) {
                Some(inner) => FragmentTag::Disjunction {
                    inner: Box::new(inner),
                    fo_exists,
                },
                None => FragmentTag::GeneralSo,
            })
        }
        SoFormula::General(_) => Ok(FragmentTag::GeneralSo),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::formula::{Clause, SoQuant};

    fn f(prefix: Vec<SoQuant>, matrix: Vec<Vec<Literal>>) -> SoFormula {
        ClausalFormula::new(
            prefix,
            vec!["x".into(), "y".into(), "z".into()],
            matrix.into_iter().map(Clause::new).collect(),
        )
        .into()
    }

    #[test]
    fn universal_krom_without_guard() {
        let phi = f(
            vec![SoQuant::forall("X", 1)],
            vec![vec![Literal::pos("P", &["x"]), Literal::pos("X", &["x"])]],
        );
        assert_eq!(classify(&phi).unwrap(), FragmentTag::PiKrom(1));
    }

    #[test]
    fn ekrom_allows_many_universal_literals() {
        let phi = f(
            vec![SoQuant::forall("X1", 1), SoQuant::exists("Y1", 1)],
            vec![vec![
                Literal::pos("X1", &["x"]),
                Literal::pos("X1", &["y"]),
                Literal::pos("X1", &["z"]),
                Literal::pos("Y1", &["x"]),
                Literal::neg("Y1", &["x"]),
            ]],
        );
        assert_eq!(classify(&phi).unwrap(), FragmentTag::SoEkrom);
    }

    #[test]
    fn three_existential_literals_is_general() {
        let phi = f(
            vec![SoQuant::exists("Y", 1)],
            vec![vec![
                Literal::pos("Y", &["x"]),
                Literal::pos("Y", &["y"]),
                Literal::pos("Y", &["z"]),
            ]],
        );
        assert_eq!(classify(&phi).unwrap(), FragmentTag::GeneralSo);
    }

    #[test]
    fn join_of_disjuncts() {
        let tags = [FragmentTag::SigmaKromR(3), FragmentTag::FoUniversalCnf];
        assert_eq!(FragmentTag::join(&tags), Some(FragmentTag::SigmaKromR(3)));
        let tags = [FragmentTag::SigmaKrom(1), FragmentTag::PiKrom(1)];
        assert_eq!(FragmentTag::join(&tags), Some(FragmentTag::SigmaKrom(2)));
    }

    #[test]
    fn display() {
        assert_eq!(FragmentTag::SigmaKromR(1).to_string(), "Σ¹₁-KROM^r");
        assert_eq!(FragmentTag::PiKrom(12).to_string(), "Π¹₁₂-KROM");
    }
}
