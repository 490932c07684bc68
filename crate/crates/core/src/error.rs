use std::fmt;

/// Errors raised by the toolkit. Verdict-style failures (a class failing AP, an
/// axiom failing on a structure) are reported through result types instead.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("duplicate symbol {0}")]
    DuplicateSymbol(String),
    #[error("symbol {0} has arity 0")]
    ZeroArity(String),
    #[error("unknown symbol {0}")]
    UnknownSymbol(String),
    #[error("invalid annotation: {0}")]
    Annotation(String),
    #[error("duplicate element {0}")]
    DuplicateElement(String),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("arity mismatch: {symbol} expects {expected} arguments, got {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("partition violation at element {0}")]
    PartitionViolation(String),
    #[error("sort violation: {symbol}{tuple} position {position} must satisfy {required}")]
    SortViolation {
        symbol: String,
        tuple: String,
        position: usize,
        required: String,
    },
    #[error("diagonal violation: {symbol}{tuple} has distinct coordinates")]
    DiagonalViolation { symbol: String, tuple: String },
    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: Position, msg: String },
    #[error("unbound {0}")]
    Unbound(String),
    #[error("resource cap exceeded: {what} (limit {limit})")]
    ResourceCap { what: String, limit: u64 },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("strategy failure: {0}")]
    Strategy(String),
    #[error("property failure: {0}")]
    Property(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Line/column (1-based) of a parse error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

impl Error {
    pub(crate) fn parse(line: usize, col: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            pos: Position { line, col },
            msg: msg.into(),
        }
    }

    pub(crate) fn cap(what: impl Into<String>, limit: u64) -> Self {
        Error::ResourceCap {
            what: what.into(),
            limit,
        }
    }
}
