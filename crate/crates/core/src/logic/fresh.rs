use std::collections::BTreeSet;

/// Generator of identifiers that do not clash with any name already in use.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    used: BTreeSet<String>,
    counter: usize,
}

impl FreshNames {
    pub fn new<I, S>(used: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        FreshNames {
            used: used.into_iter().map(Into::into).collect(),
            counter: 0,
        }
    }

    pub fn reserve(&mut self, name: impl Into<String>) {
        self.used.insert(name.into());
    }

    /// `base_<n>` for the next counter value `n` that yields an unused name.
    pub fn fresh(&mut self, base: &str) -> String {
        loop {
            self.counter += 1;
            let candidate = format!("{base}_{}", self.counter);
            if self.used.insert(candidate.clone()) {
                return candidate;
            }
        }
    }

    /// `base` itself if unused, otherwise a fresh variant of it.
    pub fn claim(&mut self, base: &str) -> String {
        if self.used.insert(base.to_string()) {
            base.to_string()
        } else {
            self.fresh(base)
        }
    }

    pub fn fresh_many(&mut self, base: &str, count: usize) -> Vec<String> {
        (0..count).map(|_| self.fresh(base)).collect()
    }
}
