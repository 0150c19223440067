//! Model checking with a choice of evaluation route.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::eval::alternating::eval_alternating_with;
use crate::eval::circuit::{eval_qbf_search, ground_expr, prenex_so};
use crate::eval::ground::{ground_with, GroundMode};
use crate::eval::limits::{Limits, Stats};
use crate::eval::qbf::eval_qbf_bruteforce;
use crate::eval::tree::eval_tree;
use crate::logic::formula::{ClausalFormula, SoFormula};
use crate::logic::structure::FiniteStructure;

/// How a formula is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Route {
    /// Chosen from the shape of the formula.
    #[default]
    Auto,
    /// Recursive evaluation of the formula tree, enumerating second-order
    /// quantifiers.
    Tree,
    /// Grounding followed by brute-force QBF evaluation.
    GroundBruteforce,
    /// Alternating evaluation with a 2-SAT leaf for clausal formulas, ground
    /// circuit search for other prenex formulas.
    Specialized,
}

impl std::str::FromStr for Route {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Route::Auto),
            "tree" => Ok(Route::Tree),
            "bruteforce" | "ground" => Ok(Route::GroundBruteforce),
            "specialized" => Ok(Route::Specialized),
            _ => Err(Error::Unsupported(format!("unknown route `{s}`"))),
        }
    }
}

/// Evaluator state: limits and the accumulated route counters.
#[derive(Debug, Clone, Default)]
pub struct Evaluator {
    pub limits: Limits,
    pub stats: Stats,
}

impl Evaluator {
    pub fn new(limits: Limits) -> Self {
        Evaluator {
            limits,
            stats: Stats::default(),
        }
    }

    pub fn check(&mut self, formula: &SoFormula, structure: &FiniteStructure) -> Result<bool> {
        self.check_route(formula, structure, Route::Auto)
    }

    pub fn check_route(
        &mut self,
        formula: &SoFormula,
        structure: &FiniteStructure,
        route: Route,
    ) -> Result<bool> {
        formula.validate()?;
        match route {
            Route::Tree => {
                self.stats.tree_calls += 1;
                eval_tree(&formula.to_expr(), structure, &self.limits)
            }
            Route::GroundBruteforce => match formula {
                SoFormula::Clausal(c) => self.ground_bruteforce(c, structure),
                SoFormula::Disjunction(ds) => {
                    for d in ds {
                        if self.ground_bruteforce(d, structure)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                }
                SoFormula::General(e) => {
                    let (q, _) = ground_expr(e, structure)?;
                    self.stats.qbf_bruteforce_calls += 1;
                    eval_qbf_bruteforce(&q, &self.limits)
                }
            },
            Route::Auto | Route::Specialized => match formula {
                SoFormula::Clausal(c) => {
                    eval_alternating_with(c, structure, &self.limits, &mut self.stats)
                }
                SoFormula::Disjunction(ds) => {
                    for d in ds {
                        if eval_alternating_with(d, structure, &self.limits, &mut self.stats)? {
                            return Ok(true);
                        }
                    }
                    Ok(false)
                }
                SoFormula::General(e) => {
                    if route == Route::Auto && !e.has_so_quantifier() {
                        self.stats.tree_calls += 1;
                        return eval_tree(e, structure, &self.limits);
                    }
                    match prenex_so(e) {
                        Some(_) => {
                            let (q, _) = ground_expr(e, structure)?;
                            eval_qbf_search(&q, &self.limits, &mut self.stats)
                        }
                        None => {
                            self.stats.tree_calls += 1;
                            eval_tree(e, structure, &self.limits)
                        }
                    }
                }
            },
        }
    }

    fn ground_bruteforce(&mut self, c: &ClausalFormula, s: &FiniteStructure) -> Result<bool> {
        let n = s.size();
        let k = c.fo_exists.len();
        let count = (n as u128).pow(k as u32);
        for m in 0..count {
            let mut rest = m;
            let mut fixed = BTreeMap::new();
            for v in c.fo_exists.iter().rev() {
                fixed.insert(v.clone(), (rest % n as u128) as usize);
                rest /= n as u128;
            }
            let (q, _) = ground_with(c, s, &fixed, GroundMode::Full)?;
            self.stats.qbf_bruteforce_calls += 1;
            if eval_qbf_bruteforce(&q, &self.limits)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// `structure ⊨ formula`, evaluated along the automatic route with limits
/// taken from the environment.
pub fn check_model(formula: &SoFormula, structure: &FiniteStructure) -> Result<bool> {
    Evaluator::new(Limits::from_env()?).check(formula, structure)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textio::{parse_formula, parse_structure};

    #[test]
    fn routes_agree_on_mixed_shapes() {
        let formulas = [
            "exists2 R/2. exists2 Y/2. all x y z. (~E(x,y)|R(x,y)) & (~E(x,y)|~R(y,z)|R(x,z)) \
             & (R(x,y)|Y(x,y)) & (~Y(x,y)|~R(x,y)) & (some Y)",
            "forall2 X/1. exists2 Y/1. all x. (~X(x) | Y(x)) & (X(x) | ~Y(x))",
            "forall x. exists y. E(x,y)",
            "exists2 X/1. forall x y. E(x,y) -> (X(x) <-> ~X(y))",
        ];
        let structures = [
            "domain 1\nrel E/2 = {}",
            "domain 2\nrel E/2 = {(0,1)}",
            "domain 2\nrel E/2 = {(0,1),(1,0)}",
            "domain 3\nrel E/2 = {(0,1),(1,2),(2,0)}",
        ];
        for f in formulas {
            let f = parse_formula(f).unwrap();
            for st in structures {
                let s = parse_structure(st).unwrap();
                let mut ev = Evaluator::default();
                let auto = ev.check(&f, &s).unwrap();
                for r in [Route::Tree, Route::GroundBruteforce, Route::Specialized] {
                    assert_eq!(ev.check_route(&f, &s, r).unwrap(), auto, "{r:?}");
                }
            }
        }
    }

    #[test]
    fn trivially_true_matrix() {
        let f = parse_formula("exists2 X/1. all x. true").unwrap();
        let s = parse_structure("domain 2").unwrap();
        assert!(check_model(&f, &s).unwrap());
    }

    #[test]
    fn not_scc_single_node() {
        let f = parse_formula(
            "exists2 R/2. exists2 Y/2. all x y z. (~E(x,y)|R(x,y)) & (~E(x,y)|~R(y,z)|R(x,z)) \
             & (R(x,y)|Y(x,y)) & (~Y(x,y)|~R(x,y)) & (some Y)",
        )
        .unwrap();
        let s = parse_structure("domain 1\nrel E/2 = {}").unwrap();
        assert!(check_model(&f, &s).unwrap());
    }
}
