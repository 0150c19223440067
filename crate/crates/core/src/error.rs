use std::fmt;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: Pos, msg: String },

    /// The input is not shaped the way the operation requires (arity clash,
    /// non-clausal formula where a clausal one is needed, ...).
    #[error("structural error: {0}")]
    Structural(String),

    /// The operation's precondition on its input fragment does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A configured evaluation or enumeration budget would be exceeded.
    #[error("resource limit exceeded: {what} needs {needed}, limit is {limit}")]
    Resource {
        what: String,
        needed: u128,
        limit: u128,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub(crate) fn parse(pos: Pos, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos,
            msg: msg.into(),
        }
    }

    pub(crate) fn structural(msg: impl Into<String>) -> Self {
        Error::Structural(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn resource(what: impl Into<String>, needed: u128, limit: u128) -> Self {
        Error::Resource {
            what: what.into(),
            needed,
            limit,
        }
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. })
    }
}

/// Line/column position in a source text (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
