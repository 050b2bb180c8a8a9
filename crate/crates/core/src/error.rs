use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("mixed moduli: {0} and {1}")]
    ModulusMismatch(u64, u64),
    #[error("size mismatch: expected {expected}, got {got}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("not a permutation: {0:?}")]
    NotAPermutation(Vec<usize>),
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("invalid Barratt-Eccles tuple: {0}")]
    InvalidTuple(String),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("cannot graft onto a cork")]
    GraftOntoCork,
    #[error("enumeration cap exceeded: {what} needs {needed} > cap {cap}")]
    CapExceeded { what: String, needed: u128, cap: u128 },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("degree error: {0}")]
    Degree(String),
    #[error("differential does not square to zero")]
    NotAComplex,
    #[error("{0} is not a Maurer-Cartan element")]
    NotMaurerCartan(&'static str),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse { line: e.line(), column: e.column(), message: e.to_string() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
