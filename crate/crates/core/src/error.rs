use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },

    #[error("semiring mismatch: expected {expected}, found {found}")]
    SemiringMismatch { expected: String, found: String },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown state {0}")]
    UnknownState(u64),

    #[error("duplicate state {0}")]
    DuplicateState(u64),

    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("automaton accepts the empty word")]
    EmptyWordAccepted,

    #[error("automaton is not normalized")]
    NotNormalized,

    #[error("automaton is not a loopback automaton")]
    NotLoopback,

    #[error("wrong automaton class: expected {expected}, found {found}")]
    WrongClass { expected: &'static str, found: &'static str },

    #[error("star applied to an expression with non-zero empty-word coefficient")]
    ImproperStar,

    #[error("no exact activation procedure for {0}; use a horizon method")]
    UnsupportedExactDecision(&'static str),

    #[error("{0} requires a field")]
    NotAField(&'static str),

    #[error("empty term list")]
    EmptyTermList,

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, column, message: message.into() }
    }

    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse { .. })
    }
}
