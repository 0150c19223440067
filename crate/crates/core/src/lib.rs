//! Second-order Krom logics over finite structures.
//!
//! Formulas are parsed from `.sof` text ([`textio`]), classified into
//! fragments ([`logic::classify`]), evaluated on finite structures
//! ([`eval`]), rewritten between fragments ([`transforms`]) and translated
//! along the alternation hierarchy ([`hierarchy`]). [`harness`] provides
//! enumeration, random corpora and equivalence testing.

pub mod error;
pub mod eval;
pub mod harness;
pub mod hierarchy;
pub mod logic;
pub mod textio;
pub mod transforms;

pub use error::{Error, Result};
pub use eval::{check_model, Evaluator, Limits, Route, Stats};
pub use harness::{enumerate_structures, equiv_test, EquivReport};
pub use logic::{
    classify, ClausalFormula, Clause, Expr, FiniteStructure, FragmentTag, Literal, Quantifier, SoFormula, SoQuant,
    Term, Vocabulary,
};
pub use textio::{parse_formula, parse_structure, parse_vocabulary};
