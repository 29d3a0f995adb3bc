//! Error type shared by all solvers and constructors.

use thiserror::Error;

/// Library-wide error enum.
///
/// Domain violations (`NonPositive`, `InvalidExponent`, ...) correspond to
/// inputs outside the mathematical domain of an operation. `ExactnessLost`
/// and `FloatOnly` are raised by the rational backend when a result would be
/// irrational; rerunning on the float backend always succeeds.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0} must be a strictly positive finite value")]
    NonPositive(&'static str),

    #[error("penalty exponent must be a finite positive real, got {0}")]
    InvalidExponent(f64),

    #[error("sublevel threshold must be nonnegative, got {0}")]
    NegativeLevel(String),

    #[error("delta must lie in the open interval (0, 1), got {0}")]
    DeltaOutOfRange(String),

    #[error("intrinsic cost {cost} exceeds the requested level {level}")]
    LevelBelowIntrinsicCost { cost: String, level: String },

    #[error("dictionary must be nonempty")]
    EmptyDictionary,

    #[error("{0} must be nonempty")]
    EmptyInput(&'static str),

    #[error("{0} must be nonnegative")]
    Negative(&'static str),

    #[error("interval bounds must satisfy 0 < lo <= hi")]
    BadInterval,

    #[error("box bounds must satisfy lo <= hi componentwise")]
    BadBox,

    #[error("duplicate scale {0} (decision boundaries require pairwise distinct scales)")]
    DuplicateScale(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("unknown object id {0:?}")]
    UnknownId(String),

    #[error("operation requires a {expected} dictionary, got {found}")]
    VariantMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("result is irrational on the exact backend ({0}); use the float backend")]
    ExactnessLost(String),

    #[error("{0} requires the float backend")]
    FloatOnly(&'static str),

    #[error("polytope is empty (no feasible point found)")]
    InfeasiblePolytope,

    #[error("halfspace normal must be a nonzero finite vector")]
    BadHalfspace,

    #[error("chain length k must be at least 1")]
    ZeroSteps,

    #[error("quadratic bounds are defined for the canonical exponent only")]
    NonCanonical,

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
