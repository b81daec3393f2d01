use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("not a rational literal: {0:?} (expected p/q, an integer or a decimal)")]
    Rational(String),
    #[error("malformed JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Format(String),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("points are coplanar or collinear; flat bodies are not supported")]
    DegenerateInput,
    #[error("half-space intersection is unbounded")]
    Unbounded,
    #[error("half-space intersection is empty")]
    Empty,
    #[error("half-space intersection has affine dimension {dim}")]
    LowerDimensional { dim: usize },
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("lattice basis is singular")]
    SingularBasis,
    #[error("translate {index} duplicates an earlier translate")]
    DuplicateTranslate { index: usize },
    #[error("index {index} out of range for {len} translates")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("slices are taken at different heights")]
    HeightMismatch,
    #[error("slices do not overlap with positive area")]
    NotOverlapping,
    #[error("no height avoids every bad window")]
    NoFeasibleHeight,
    #[error("grid step must be positive")]
    NonPositiveStep,
    #[error("translates do not cover the region ({gaps} gap cells)")]
    NotACovering { gaps: usize },
    #[error("no translate's body contains the origin")]
    NoOriginTranslate,
    #[error("coordinates need a common denominator too large for the integer grid")]
    ScaleOverflow,
    #[error("initial configuration does not cover the region")]
    InitialNotCovering,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
