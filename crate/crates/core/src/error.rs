use thiserror::Error;

/// Errors produced by the numeration and carry-propagation routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet mismatch: size {left} vs size {right}")]
    AlphabetMismatch { left: u32, right: u32 },

    #[error("digit {digit} out of range for an alphabet of size {size}")]
    DigitOutOfRange { digit: u32, size: u32 },

    #[error("invalid alphabet size {0}")]
    InvalidAlphabet(u64),

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("language is empty after trimming")]
    EmptyLanguage,

    #[error("word {0} does not belong to the language")]
    NotInLanguage(String),

    #[error("sequence prefix too short: need {needed} terms, got {got}")]
    PrefixTooShort { needed: usize, got: usize },

    #[error("precision cap of {bits} bits exceeded: {reason}")]
    PrecisionExceeded { bits: u32, reason: String },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid basis: {0}")]
    InvalidBasis(String),

    #[error("invalid rational base {p}/{q}: {reason}")]
    InvalidRationalBase { p: u64, q: u64, reason: String },

    #[error("invalid algebraic number: {0}")]
    InvalidAlgebraic(String),

    #[error("the Parry class of beta is unknown within the state cap")]
    UnknownParryClass,

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("language is not prefix-closed and extendable: {0}")]
    NotPce(String),
}

pub type Result<T> = std::result::Result<T, Error>;
