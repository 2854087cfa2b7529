use crate::exact::Rational;

/// Errors raised anywhere in the pipeline.
///
/// Several variants are classification outcomes rather than bugs
/// (`NotFound`, `CardinalityMismatch`, `RankNeverAchieved`); callers decide
/// whether they are fatal.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("linear system has no solution")]
    NoSolution,
    #[error("duplicate interpolation abscissa {0}")]
    DuplicateAbscissa(Rational),
    #[error("interpolation verification failed at extra point {point:?} (degree {degree})")]
    VerificationFailed { degree: Rational, point: Vec<Rational> },
    #[error("sample matrix stayed rank deficient after {blocks} seed blocks")]
    SingularSystem { blocks: usize },
    #[error("invalid grading weights: {0}")]
    InvalidWeights(String),
    #[error("invalid algebra descriptor: {0}")]
    InvalidAlgebra(String),
    #[error("invalid partition {parts:?}: {reason}")]
    InvalidPartition { parts: Vec<usize>, reason: String },
    #[error("matrix does not lie in the algebra")]
    NotInAlgebra,
    #[error("ad_h eigenvalues outside the scanned range (found dims summing to {found} of {dim})")]
    IncompleteDecomposition { found: usize, dim: usize },
    #[error("no cyclic element found in the bounded search")]
    NotFound,
    #[error("element is not regular semisimple")]
    NotRegularSemisimple,
    #[error("opposite Cartan normalization unavailable: {0}")]
    Normalization(String),
    #[error("pairing between g^L1 and g^f is degenerate")]
    DegeneratePairing,
    #[error("covector extension is singular at lambda = {lambda}")]
    SingularExtension { lambda: Rational },
    #[error("Jacobian rank deficient: {rank} < {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("family cardinality {found} differs from expected {expected}")]
    CardinalityMismatch { found: usize, expected: usize },
    #[error("counterexample: {0}")]
    CounterexampleFound(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
