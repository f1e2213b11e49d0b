use thiserror::Error;

use crate::weighted_algebra::Weight;

/// Errors raised by the library.
#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("weights must be nondecreasing (adapted order); position {0} breaks the order")]
    NotAdapted(usize),

    #[error("a weight specification needs at least one coordinate")]
    EmptySpec,

    #[error("operation requires strictly negative weights")]
    NonNegativeWeights,

    #[error("incompatible splitting: {0}")]
    IncompatibleSplitting(String),

    #[error("weight specifications do not match: {0}")]
    SpecMismatch(String),

    #[error("polynomial map is not subresonant (term into coordinate {out} with exponents {alpha:?} has weight {weight})")]
    NotSubresonant {
        out: usize,
        alpha: Vec<u32>,
        weight: Weight,
    },

    #[error("linear part is singular (|det| = {0:e})")]
    SingularLinearPart(f64),

    #[error("round-trip residual {residual:e} exceeds tolerance {tolerance:e}")]
    RoundTrip { residual: f64, tolerance: f64 },

    #[error("{group} membership violated: {detail}")]
    MembershipViolation { group: &'static str, detail: String },

    #[error("zero vector has no finite growth rate")]
    ZeroVector,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("series is empty")]
    EmptySeries,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("numerical overflow: {0}")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
