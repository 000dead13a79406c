use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid substitution rule: {0}")]
    InvalidRule(String),
    #[error("occurrence matrix is not primitive")]
    NotPrimitive,
    #[error("word length {requested} exceeds the cap of {cap} letters")]
    LengthLimit { requested: u128, cap: usize },
    #[error("empty word")]
    EmptyWord,
    #[error("letter {0:?} is not in the alphabet")]
    UnknownLetter(String),
    #[error("integer overflow in recurrence at index {0}")]
    Overflow(usize),
    #[error("chain too short: {got} atoms, need at least {need}")]
    TooShort { got: usize, need: usize },
    #[error("matrix size {got} exceeds the oracle limit {limit}")]
    SizeLimit { got: usize, limit: usize },
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("no power of the substitution up to {0} admits a fixed point")]
    NoFixedPoint(u32),
    #[error("group not recognized: {0}")]
    Unrecognized(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
