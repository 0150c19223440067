//! Concrete syntax for formulas (`.sof`), structures (`.fst`), vocabularies
//! (`.voc`), prefixed DNF QBFs (`.qbf`) and QDIMACS output.

pub mod formula;
pub(crate) mod lexer;
pub mod print;
pub mod qbf;
pub mod qdimacs;
pub mod structure;

pub use formula::parse_formula;
pub use qbf::{parse_qbf, print_qbf};
pub use qdimacs::emit_qdimacs;
pub use structure::{parse_structure, parse_vocabulary, print_structure};
