use crate::error::{Error, Result};

pub const ENV_LIMIT_VARS: &str = "KROMLAB_LIMIT_VARS";
pub const ENV_LIMIT_ASSIGN: &str = "KROMLAB_LIMIT_ASSIGN";

/// Evaluation budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Ground variables a brute-force QBF evaluation may enumerate.
    pub max_vars: usize,
    /// Assignments enumerated for a single second-order quantifier block.
    pub max_assignments: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_vars: 24,
            max_assignments: 1 << 20,
        }
    }
}

impl Limits {
    /// Defaults, overridden by `KROMLAB_LIMIT_VARS` / `KROMLAB_LIMIT_ASSIGN`.
    pub fn from_env() -> Result<Self> {
        let mut limits = Limits::default();
        if let Ok(v) = std::env::var(ENV_LIMIT_VARS) {
            limits.max_vars = v
                .trim()
                .parse()
                .map_err(|_| Error::Unsupported(format!("{ENV_LIMIT_VARS}={v} is not a number")))?;
        }
        if let Ok(v) = std::env::var(ENV_LIMIT_ASSIGN) {
            limits.max_assignments = v
                .trim()
                .parse()
                .map_err(|_| Error::Unsupported(format!("{ENV_LIMIT_ASSIGN}={v} is not a number")))?;
        }
        Ok(limits)
    }

    /// Number of assignments of a block with `atoms` ground atoms, or a
    /// resource error naming the block.
    pub(crate) fn block_assignments(&self, block: &str, atoms: usize) -> Result<u64> {
        let needed: u128 = if atoms >= 127 { u128::MAX } else { 1u128 << atoms };
        if needed > self.max_assignments as u128 {
            return Err(Error::resource(
                format!("assignments for block {block}"),
                needed,
                self.max_assignments as u128,
            ));
        }
        Ok(needed as u64)
    }
}

/// Counters describing which evaluation routes were taken.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    /// Leaves decided by the 2-SAT solver.
    pub twosat_calls: u64,
    /// Leaves whose ground matrix was not 2-CNF and went to general search.
    pub fallback_calls: u64,
    /// Brute-force QBF evaluations.
    pub qbf_bruteforce_calls: u64,
    /// Direct recursive evaluations of formula trees.
    pub tree_calls: u64,
    /// SAT-solver searches over grounded circuits.
    pub sat_calls: u64,
    /// Leaves decided by checking that no ground clause survives.
    pub validity_checks: u64,
    /// Outer second-order assignments enumerated.
    pub assignments: u64,
}

impl Stats {
    /// Whether any exponential brute-force route was used.
    pub fn used_bruteforce(&self) -> bool {
        self.fallback_calls > 0 || self.qbf_bruteforce_calls > 0 || self.tree_calls > 0
    }

    pub fn merge(&mut self, other: &Stats) {
        self.twosat_calls += other.twosat_calls;
        self.fallback_calls += other.fallback_calls;
        self.qbf_bruteforce_calls += other.qbf_bruteforce_calls;
        self.tree_calls += other.tree_calls;
        self.sat_calls += other.sat_calls;
        self.validity_checks += other.validity_checks;
        self.assignments += other.assignments;
    }
}
