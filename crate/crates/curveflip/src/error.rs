use thiserror::Error;

/// Errors produced by triangulation, coordinate and simplification operations.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid triangulation: {0}")]
    InvalidTriangulation(String),
    #[error("edge {edge} is not flippable (both occurrences lie in one triangle)")]
    NotFlippable { edge: usize },
    #[error("weight vector has length {got}, triangulation has {expected} edges")]
    LengthMismatch { expected: usize, got: usize },
    #[error("parity violation in triangle {triangle}: side weights sum to an odd number")]
    ParityViolation { triangle: usize },
    #[error("triangle inequality violation in triangle {triangle}")]
    TriangleInequalityViolation { triangle: usize },
    #[error("inadmissible result: {0}")]
    InadmissibleResult(String),
    #[error("edge {edge} carries no crossing points")]
    EmptyEdge { edge: usize },
    #[error("strand realization cap exceeded: total {total} > cap {cap}")]
    CapExceeded { total: String, cap: u64 },
    #[error("curve is not simple on this triangulation (total {total} > 2*zeta = {bound})")]
    NotSimple { total: String, bound: usize },
    #[error("candidate loop is null-homotopic after tightening")]
    NullHomotopic,
    #[error("twist curve invalid: {0}")]
    TwistCurveInvalid(String),
    #[error("standardization failed: {0}")]
    StandardizationFailed(String),
    #[error("no progress possible at total {total} > 2*zeta; state violates the reducing-flip guarantee")]
    LemmaViolation { total: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
