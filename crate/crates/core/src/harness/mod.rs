//! Structure enumeration, random corpora, equivalence testing and oracles.

pub mod enumerate;
pub mod equiv;
pub mod oracles;
pub mod random;

pub use enumerate::{enumerate_structures, StructureSpace};
pub use equiv::{equiv_test, equiv_test_with, Counterexample, EquivReport, Verdict};
pub use oracles::scc_strong_connectivity;
pub use random::{random_digraph, random_dnf_qbf, random_formula, random_prenex_fo, random_so_source, Profile};
