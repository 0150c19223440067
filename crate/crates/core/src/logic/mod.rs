//! Vocabularies, finite structures, second-order formulas and their
//! syntactic classification.

pub mod classify;
pub mod formula;
pub mod fresh;
pub mod structure;
pub mod substitute;
pub mod vocab;

pub use classify::{classify, FragmentTag};
pub use formula::{ClausalFormula, Clause, Expr, Literal, Quantifier, SoFormula, SoQuant, Term};
pub use fresh::FreshNames;
pub use structure::{FiniteStructure, Relation};
pub use substitute::{substitute, Replacement};
pub use vocab::Vocabulary;
