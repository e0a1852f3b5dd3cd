use thiserror::Error;

/// Errors raised by the library layer.
///
/// Mathematical anomalies that a certification run is expected to observe
/// (non-integral terms, failed identities) are reported as data, not as
/// errors. The variants here signal misuse or a broken invariant.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("negative argument {0} where a nonnegative integer is required")]
    NegativeArgument(i64),

    #[error("variable sets differ: [{left}] vs [{right}]")]
    VarSetMismatch { left: String, right: String },

    #[error("duplicate variable name `{0}`")]
    DuplicateVariable(String),

    #[error("no value assigned to variable `{0}`")]
    MissingAssignment(String),

    #[error("inexact division by linear form {divisor}: remainder {remainder}")]
    InexactDivision { divisor: String, remainder: String },

    #[error("divisor vector is zero or has the wrong length")]
    BadDivisor,

    #[error("truncation orders differ: {0} vs {1}")]
    OrderMismatch(usize, usize),

    #[error("series constant term must be exactly 1, found {0}")]
    ConstantTermNotOne(String),

    #[error("sequence has {have} terms, {need} required")]
    InsufficientTerms { need: usize, have: usize },

    #[error("integrality violated at n = {n}: division by {divisor} is not exact")]
    IntegralityViolation { n: usize, divisor: String },

    #[error("odd powers of the adjoined root survive at n = {n}: {residue}")]
    OddPowerSurvives { n: usize, residue: String },

    #[error("polynomial {0} is not odd")]
    NotOdd(String),

    #[error("polynomial {0} has non-integer coefficients")]
    NotIntegral(String),

    #[error("bracket at m = {m:?} is not in Z[1/2][x]: denominator {denominator}")]
    NotTwoAdic { m: Vec<u32>, denominator: String },

    #[error("bracket at m = {m:?}: {source}")]
    Bracket { m: Vec<u32>, source: Box<Error> },

    #[error("lattice point has dimension {got}, table has dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{line}:{column}: index {index} outside n-1, n-2, ...")]
    IndexOutOfRange {
        line: usize,
        column: usize,
        index: String,
    },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("{0}")]
    Spec(String),
}

pub type Result<T> = std::result::Result<T, Error>;
