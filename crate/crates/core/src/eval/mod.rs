//! Grounding and truth evaluation.

pub mod alternating;
pub mod check;
pub mod circuit;
pub mod ground;
pub mod limits;
pub mod qbf;
pub mod sat;
pub mod tree;
pub mod twosat;

pub use alternating::{eval_alternating, eval_alternating_with};
pub use check::{check_model, Evaluator, Route};
pub use circuit::{eval_qbf_search, ground_expr};
pub use ground::{ground, ground_with, GroundAtomIndex, GroundMode};
pub use limits::{Limits, Stats};
pub use qbf::{eval_qbf_bruteforce, Circuit, GroundQbf, Matrix, QBlock};
pub use twosat::eval_2sat;
