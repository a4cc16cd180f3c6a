use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("no non-null pivot could be formed at step {0}")]
    NullPivotExhausted(usize),
    #[error("inconsistent assignment at component {indices:?}: {first} vs {second}")]
    InconsistentAssignment {
        indices: (usize, usize, usize),
        first: String,
        second: String,
    },
    #[error("three-form has zero length")]
    NullLength,
    #[error("numerical breakdown: {0}")]
    NumericalBreakdown(String),
    #[error("form could not be brought to a known normal form: {0}")]
    Unclassified(String),
    #[error("not of constant type: worst residual {residual:e} at {witness}")]
    NotConstantType { residual: f64, witness: String },
    #[error("not of twistorial type: smallest singular value ratio {ratio:e}")]
    NotTwistorialType { ratio: f64 },
    #[error("operator is not a scalar multiple of the identity: residual {0:e}")]
    NotScalar(f64),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("missing field: {0}")]
    MissingField(String),
    #[error("missing connection data: {0}")]
    MissingConnection(String),
    #[error("Jacobi identity violated at {0}")]
    JacobiViolation(String),
    #[error("invariance violated: {0}")]
    InvarianceViolation(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("variation parameter must be nonzero")]
    ZeroParameter,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
