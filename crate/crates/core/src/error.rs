use thiserror::Error;

use crate::chainkit::StabilizationFailure;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus {0} is not a prime power")]
    NotPrimePower(u64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid module: {0}")]
    InvalidModule(String),

    #[error("invalid map: {0}")]
    InvalidMap(String),

    #[error("ambient ring mismatch: {0}")]
    AmbientMismatch(String),

    #[error("not a complex: {0}")]
    NotAComplex(String),

    #[error("chain map violation in degree {degree}: {detail}")]
    ChainMapViolation { degree: i64, detail: String },

    #[error("no stabilization within k_max = {}", .0.k_max)]
    NoStabilization(Box<StabilizationFailure>),

    #[error("sequence is not certified regular: {0}")]
    NotCertified(String),

    #[error("element cannot be realized: {0}")]
    Unrealizable(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("ring too large: {0}")]
    RingTooLarge(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unknown theorem id `{id}`; valid ids: {}", .valid.join(", "))]
    UnknownTheorem { id: String, valid: Vec<String> },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
