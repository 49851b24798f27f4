use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NonHermitianInput { asymmetry: f64, tolerance: f64 },

    #[error("invalid Schatten order p = {0} (need p >= 1)")]
    InvalidOrder(f64),

    #[error("polynomial has degree zero")]
    DegreeZero,

    #[error("polynomial is not real-rooted: root imaginary part {imag:e} exceeds {bound:e}")]
    NotRealRooted { imag: f64, bound: f64 },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("sigma is degenerate ({0:e}); cannot normalize")]
    DegenerateSigma(f64),

    #[error("enumeration of {required} assignments exceeds the cap of {cap}")]
    EnumerationTooLarge { required: u128, cap: u128 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("barrier walk failed at step {step}: {reason}")]
    WalkStepFailed { step: usize, reason: String },

    #[error("point is not above the roots: {0}")]
    NotAboveRoots(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("invalid frame shape: {0}")]
    InvalidShape(String),

    #[error("family too large: {0}")]
    TooLarge(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownName {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}
