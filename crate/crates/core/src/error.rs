use thiserror::Error;

use crate::probvec::Rat;

/// Errors produced by the library. Indices in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },

    #[error("probability vector is empty")]
    EmptyVector,

    #[error("component {index} is negative ({value})")]
    NegativeEntry { index: usize, value: Rat },

    #[error("components sum to zero")]
    ZeroTotal,

    #[error("components sum to {sum}, expected exactly 1")]
    NotNormalized { sum: Rat },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("catalyst must be {expected}-dimensional, got {found} components")]
    CatalystDimension { expected: usize, found: usize },

    #[error(
        "catalyst component {index} is zero; catalysts must have strictly positive components"
    )]
    ZeroCatalystComponent { index: usize },

    #[error("no useful catalyst exists: {reason}")]
    NoCatalyst { reason: String },

    #[error("theta must lie in the open interval (0, 1), got {0}")]
    ThetaOutOfRange(Rat),

    #[error("alpha must lie in ({alpha_min}, 1), got {alpha}")]
    AlphaOutOfRange {
        alpha: Box<Rat>,
        alpha_min: Box<Rat>,
    },

    #[error(
        "constructed catalyst failed verification: P after = {p_after}, P before = {p_before}"
    )]
    ConstructionFailed {
        p_before: Box<Rat>,
        p_after: Box<Rat>,
    },

    #[error("resolution must be at least {min}, got {found}")]
    InvalidResolution { min: usize, found: usize },

    #[error("maximum catalyst dimension must be at least 2, got {0}")]
    InvalidDimension(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
