use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("element is not hyperbolic (|tr| = {trace_abs})")]
    NotHyperbolic { trace_abs: f64 },
    #[error("anchor point is off the geodesic (offset {offset:e})")]
    InvalidAnchor { offset: f64 },
    #[error("invalid Schottky data: {0}")]
    InvalidSchottky(String),
    #[error("surface model construction failed: {0}")]
    ModelConstructionFailed(String),
    #[error("word reduces to the identity")]
    EmptyClass,
    #[error("invalid word {0:?}")]
    InvalidWord(String),
    #[error("{steps} steps are too few for a segment of length {length}")]
    StepCountTooSmall { steps: usize, length: f64 },
    #[error("rank mismatch: {0}")]
    RankMismatch(String),
    #[error("class {0} is not primitive")]
    NonPrimitiveClass(String),
    #[error("class lists differ: {0}")]
    KeyMismatch(String),
    #[error("insufficient trace data: {0}")]
    InsufficientData(String),
    #[error("ill-conditioned recovery: {0}")]
    IllConditioned(String),
    #[error("no k ≤ {max} with ‖U^k − I‖ ≤ {tol}")]
    NoWrapFound { max: usize, tol: f64 },
    #[error("degenerate homoclinic endpoints")]
    DegenerateEndpoints,
    #[error("empty concatenation")]
    EmptyConcatenation,
    #[error("invalid bump: {0}")]
    InvalidBump(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),
}

pub type Result<T> = std::result::Result<T, LabError>;
