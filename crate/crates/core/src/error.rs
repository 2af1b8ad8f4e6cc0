use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("scalar has a pole at q = 0")]
    PoleAtZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid Borcherds-Cartan datum: {0}")]
    InvalidDatum(String),
    #[error("weight {0:?} is not dominant")]
    NotDominant(Vec<i64>),
    #[error("quantum factorial of negative argument {0}")]
    NegativeFactorial(i64),
    #[error("quantum binomial [{top} over {bottom}] is out of range")]
    BinomialRange { top: i64, bottom: i64 },
    #[error("weight mismatch: {0}")]
    WeightMismatch(String),
    #[error("weight of height {height} is beyond truncation depth {depth}")]
    BeyondDepth { height: usize, depth: usize },
    #[error("string decomposition needs weights beyond truncation depth {depth}")]
    TruncationEscape { depth: usize },
    #[error("lattice violation: {0}")]
    LatticeViolation(String),
    #[error("global basis solver did not converge: {0}")]
    NoConvergence(String),
    #[error("the zero vector has no filtration level")]
    ZeroVector,
    #[error("not a basis: {0}")]
    NotABasis(String),
    #[error("string datum walk did not terminate within {0} steps")]
    NonTermination(usize),
    #[error("hypothesis failed: {0}")]
    HypothesisFailed(String),
    #[error("change of basis is not monomial at string datum {datum:?}")]
    NotMonomial { datum: Vec<u32> },
    #[error("not a dual perfect basis: {0}")]
    NotDualPerfect(String),
    #[error("invalid space: {0}")]
    InvalidSpace(String),
    #[error("string decomposition failed: {0}")]
    Decomposition(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
