use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced by the toolkit.
///
/// Budget errors ([`Error::MemoryBudget`], [`Error::EnumerationBudget`]) are
/// distinguished from domain/validation errors so callers can map them to
/// different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse cubic form {0:?}: expected four comma-separated integers or rationals")]
    ParseForm(String),

    #[error("cannot parse rational {0:?}: expected an integer or \"num/den\"")]
    ParseRational(String),

    #[error("coefficient {value} exceeds the counting bound |coeff| <= {limit}")]
    CoefficientRange { value: String, limit: i64 },

    #[error("counting requires integer coefficients, but {0} is not an integer")]
    NonIntegerCoefficient(String),

    #[error("range N = {n} exceeds the counting bound N <= {limit}")]
    RangeBound { n: u32, limit: u32 },

    #[error("incompatible tables: {0}")]
    IncompatibleTables(String),

    #[error("lattice coordinate overflowed the signed 64-bit range during convolution")]
    CoordinateOverflow,

    #[error(
        "estimated table footprint {estimated_bytes} bytes exceeds the memory cap {cap_bytes}"
    )]
    MemoryBudget { estimated_bytes: BigUint, cap_bytes: u64 },

    #[error("enumerating {tuples} tuples exceeds the brute-force budget {budget}")]
    EnumerationBudget { tuples: BigUint, budget: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series diverges at p = {p}: effective ratio (3/2)(1 - alpha2) beta2 = {ratio} >= 1")]
    Divergence { p: String, ratio: String },

    #[error("pole at p = {p}: 15 - 10 p + p^2 = 0")]
    Pole { p: String },

    #[error("duplicate square index {0}")]
    DuplicateSquare(usize),

    #[error("square index {index} out of range for a {k}x{k} grid")]
    SquareIndex { index: usize, k: u32 },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed table file: {0}")]
    BadTableFile(String),
}

impl Error {
    /// True for errors caused by a resource budget rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::MemoryBudget { .. } | Error::EnumerationBudget { .. }
        )
    }
}
