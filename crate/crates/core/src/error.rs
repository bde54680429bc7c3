use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty point set")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unsupported dimension {0}")]
    UnsupportedDimension(usize),
    #[error("point is not in the polytope")]
    NotInPolytope,
    #[error("coordinate {0} has zero modulus")]
    ZeroCoordinate(usize),
    #[error("invalid weighted set: {0}")]
    InvalidWeightedSet(String),
    #[error("gram matrix is not positive definite (pivot {pivot}, value {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },
    #[error("orthonormality residual {0:e} exceeds rejection threshold")]
    GramResidual(f64),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("leading coefficient too small ({0:e})")]
    DegenerateLeading(f64),
    #[error("resultant vanishes identically: system is not generic")]
    DegenerateResultant,
    #[error("eigensolver failed (info = {0})")]
    Eigensolver(i32),
    #[error("no face of the polytope gives a consistent fit (best residual {0:e})")]
    MomentFit(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
