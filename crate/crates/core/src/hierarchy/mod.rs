//! QBF encodings and the translation of second-order formulas into Krom
//! formulas with guards.

pub mod intermediate;
pub mod interpret;
pub mod qbf;
pub mod qfnorm;
pub mod translate;

pub use qbf::{decode_qbf, encode_qbf, phi_formula, phi_formula_with, PrefixedDnfQbf, QbfStructureEncoding};
pub use intermediate::{ground_intermediate, negate_and_skolemize, GroundIntermediate, Intermediate};
pub use interpret::{
    apply_interpretation, build_interpretation, compare_with_encoding, interpret_structure, width,
    InterpretedStructure, Interpretation,
};
pub use translate::{one_element_delta, translate_sigma_k, OneElementDisjunct, Translation};
