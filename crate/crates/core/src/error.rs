use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is not square")]
    NotSquare,
    #[error("ragged matrix rows")]
    Ragged,
    #[error("matrix is not skew-symmetrizable")]
    NotSkewSymmetrizable,
    #[error("the quiver of B has a directed cycle")]
    NotAcyclic,
    #[error("symmetrizer {0:?} does not satisfy d_j b_ji = -d_i b_ij")]
    BadSymmetrizer(Vec<i64>),
    #[error("Lambda0 must be a skew-symmetric n x n matrix")]
    Lambda0NotSkew,
    #[error("compatibility condition Btilde^T Lambda = [D 0] violated")]
    Incompatible,
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("arity mismatch: {0} vs {1} variables")]
    ArityMismatch(usize, usize),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("F-polynomial has a negative exponent")]
    NegativeExponentInF,
    #[error("exact division failed: quotient is not a Laurent polynomial")]
    NotDivisible,
    #[error("divisor has a non-unit leading coefficient")]
    NonUnitLeading,
    #[error("exponent overflow")]
    ExponentOverflow,
    #[error("quantum torus elements live over different Lambda")]
    LambdaMismatch,
    #[error("no term with zero y-exponent")]
    NoConstantTerm,

    #[error("{what}: {needed} exceeds cap {cap}")]
    CapExceeded { what: String, needed: String, cap: u64 },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("representations live over different field towers")]
    TowerMismatch,
    #[error("no rigid representation found in {attempts} attempts")]
    NoRigidFound { attempts: usize },
    #[error("vertex {0} is neither a sink nor a source")]
    NotSinkOrSource(usize),
    #[error("representation has a direct summand S_{0}")]
    HasSimpleSummand(usize),
    #[error("counting polynomial at e={e:?} disagrees at held-out prime {prime}")]
    InterpolationInconsistent { e: Vec<i64>, prime: u64 },
    #[error("exchange graph is truncated")]
    GraphTruncated,

    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
