use thiserror::Error;

/// Crate-wide error type. Every fallible operation returns one of these;
/// callers that need to branch match on the variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("modulus must be >= 1, got {0}")]
    BadModulus(String),

    #[error("exponent must be nonnegative, got {0}")]
    NegativeExponent(String),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{0} is not a prime power")]
    NotPrimePower(u64),

    #[error("inverse of zero in GF({q})")]
    ZeroInverse { q: u64 },

    #[error("label {label} is not an element of GF({q})")]
    InvalidElement { label: u64, q: u64 },

    #[error("word context mismatch: H({n_left},{q_left}) vs H({n_right},{q_right})")]
    ContextMismatch {
        n_left: usize,
        q_left: u64,
        n_right: usize,
        q_right: u64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("enumeration needs {needed} vertex visits, cap is {cap}")]
    CapExceeded { needed: u128, cap: u128 },

    #[error("code is empty")]
    EmptyCode,

    #[error("duplicate word at line {line}")]
    DuplicateWord { line: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("eigenvalue (nq-n-q+2)/q is not an integer for n={n}, q={q}")]
    NonIntegralEigenvalue { n: String, q: u64 },

    #[error("parameters are not excluded: {0}")]
    NotExcluded(String),

    #[error("no odd prime divisor found below trial-division bound {bound}")]
    WitnessSearchExhausted { bound: u64 },

    #[error("no order-based refutation from any odd prime divisor below {bound}")]
    WitnessOrderInconclusive { bound: u64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
