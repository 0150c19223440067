//! Fixtures shared by the benchmarks.

use kromlab::harness::random_digraph;
use kromlab::{parse_formula, FiniteStructure, SoFormula};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Non-strong-connectivity as a Σ¹₁ Krom formula with one guard.
pub const NOT_STRONGLY_CONNECTED: &str = "exists2 R/2. exists2 Y/2. all x y z.
  (~E(x,y) | R(x,y))
& (~E(x,y) | ~R(y,z) | R(x,z))
& (R(x,y) | Y(x,y))
& (~Y(x,y) | ~R(x,y))
& (some Y)";

/// A Σ¹₂ source for the translation benchmark.
pub const SIGMA2_SOURCE: &str = "exists2 X1/1. forall2 X2/1. forall x. X1(x) | X2(x) | E(x,x)";

pub fn not_strongly_connected() -> SoFormula {
    parse_formula(NOT_STRONGLY_CONNECTED).expect("fixture parses")
}

pub fn sigma2_source() -> SoFormula {
    parse_formula(SIGMA2_SOURCE).expect("fixture parses")
}

/// Directed cycle on `n` nodes.
pub fn cycle(n: usize) -> FiniteStructure {
    let edges: Vec<String> = (0..n).map(|i| format!("({i},{})", (i + 1) % n)).collect();
    let text = format!("domain {n}\nrel E/2 = {{{}}}\n", edges.join(","));
    kromlab::parse_structure(&text).expect("cycle parses")
}

/// Seeded G(n, p) digraph.
pub fn digraph(n: usize, p: f64, seed: u64) -> FiniteStructure {
    random_digraph(&mut ChaCha8Rng::seed_from_u64(seed), n, p).expect("digraph")
}
