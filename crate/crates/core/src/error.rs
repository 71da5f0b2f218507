use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension {0} is outside the supported window 2..=6")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("cannot normalize a zero or non-finite vector")]
    ZeroVector,

    #[error("latitude {0} is outside [-pi/2, pi/2]")]
    LatitudeOutOfRange(f64),

    #[error("z = {0} is outside the open interval (-1, 1)")]
    HeightOutOfRange(f64),

    #[error("quadrature resolution {0} is below the minimum of 2")]
    ResolutionTooSmall(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field validation failed: {0}")]
    Validation(String),

    #[error("root bracketing failed at z = {z}: {reason}")]
    RootBracketing { z: f64, reason: &'static str },

    #[error("non-finite meridian derivative at an equator node")]
    Derivative,

    #[error("harmonic index (degree {degree}, order {order}) out of range")]
    HarmonicIndex { degree: usize, order: i64 },

    #[error("odd degree {degree} has near-zero multiplier {lambda:e}")]
    NearKernel { degree: usize, lambda: f64 },
}
