use thiserror::Error;

use crate::exactmath::UniPoly;
use crate::Rational;

/// Errors raised by the factorization pipeline and its kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point has {found} coordinates, oracle expects {expected}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unknown variable `{name}` at byte {pos}")]
    UnknownVariable { name: String, pos: usize },

    #[error("malformed input: {0}")]
    Format(String),

    #[error("polynomial is identically zero")]
    ZeroPolynomial,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not diagonalizable over the algebraic closure")]
    NotDiagonalizable,

    #[error("eigenvalues are not all rational (irrational factor {0})")]
    IrrationalEigenvalues(UniPoly),

    #[error("simultaneous diagonalization failed after {0} attempts")]
    RetriesExhausted(usize),

    #[error("exponent vector {0:?} is not made of positive integers")]
    NonIntegralExponents(Vec<Rational>),

    #[error(
        "centralizer system has a solution space of dimension {0}, expected a unique solution"
    )]
    SystemNotUnique(usize),

    #[error("bivariate polynomial is not a product of rational affine forms")]
    NotAffineProduct,

    #[error("bivariate projections disagree: {0}")]
    InconsistentProjections(String),

    #[error("factorization does not match the oracle at a random point")]
    VerificationFailed,

    #[error("a line restriction does not split over the rationals")]
    NotSplitOverQ,

    #[error("line probes disagree on the number or multiplicities of roots")]
    InconsistentProbes,

    #[error("hyperplane grouping failed: {0}")]
    GroupingFailed(String),

    #[error("a root point lies on {0} of the identified forms")]
    RootFormMismatch(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
