//! Truth-preserving rewrites between fragments.

pub mod guards;
pub mod prenex;
pub mod skolem;
pub mod trace;
pub mod universal;

pub use guards::{expand_exists_r, expand_exists_r_traced};
pub use prenex::{cnf, prenex_cnf, PrenexFo};
pub use skolem::{skolemize_fo, skolemize_fo_named, SkolemForm, UniversalSkolem};
pub use trace::{RewriteStep, RewriteTrace};
pub use universal::{
    drop_innermost_universal, drop_innermost_universal_traced, strip_universal_blocks,
    strip_universal_blocks_traced,
};
