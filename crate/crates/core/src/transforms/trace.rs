use std::fmt;

/// One rewrite: which rule fired, on what, and the text before and after.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteStep {
    pub rule: String,
    /// The clause index or variable the rule was applied to.
    pub target: String,
    pub before: String,
    pub after: String,
}

/// Ordered log of the rewrites performed by a transform.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RewriteTrace {
    pub steps: Vec<RewriteStep>,
}

impl RewriteTrace {
    pub fn push(
        &mut self,
        rule: impl Into<String>,
        target: impl Into<String>,
        before: impl fmt::Display,
        after: impl fmt::Display,
    ) {
        self.steps.push(RewriteStep {
            rule: rule.into(),
            target: target.into(),
            before: before.to_string(),
            after: after.to_string(),
        });
    }

    pub fn extend(&mut self, other: RewriteTrace) {
        self.steps.extend(other.steps);
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for RewriteTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "[{}] {}: {}  =>  {}", s.rule, s.target, s.before, s.after)?;
        }
        Ok(())
    }
}
