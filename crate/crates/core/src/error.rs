use thiserror::Error;

/// Errors raised by the geometric kernels, generators and analyses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeoError {
    #[error("second argument of the excess is empty")]
    EmptySecondArgument,
    #[error("point set `{0}` is empty")]
    EmptySet(String),
    #[error("input is empty")]
    EmptyInput,
    #[error("radius must be positive, got {0}")]
    NonpositiveRadius(f64),
    #[error("grid step must lie in (0, 1), got {0}")]
    InvalidGridStep(f64),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite coordinate at point {0}")]
    NonFinite(usize),
    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("invalid correspondence: {0}")]
    InvalidCorrespondence(String),
    #[error("exhaustive search limited to {limit} points per side, got {got}")]
    TooLargeForExhaustive { limit: usize, got: usize },
    #[error("map does not send base point to base point")]
    BaseNotPreserved,
    #[error("missing base point")]
    MissingBase,
    #[error("embedding is not isometric: pair ({0}, {1}) off by {2}")]
    NotIsometricEmbedding(usize, usize, f64),
    #[error("gluing subset is empty")]
    EmptySubset,
    #[error("radius {radius} exceeds set diameter {diameter}")]
    RadiusExceedsDiameter { radius: f64, diameter: f64 },
    #[error("point lies {distance} from the set, beyond resolution {resolution}")]
    PointNotInSet { distance: f64, resolution: f64 },
    #[error("window has fewer than {needed} independent directions")]
    DegenerateWindow { needed: usize },
    #[error("window is not flat enough for norm fitting (score {score} > {limit})")]
    NotFlatEnough { score: f64, limit: f64 },
    #[error("invalid range: {0}")]
    BadRange(String),
    #[error("radii rule diverges: level-sum ratio {0} >= 1")]
    DivergentRadiiRule(f64),
    #[error("invalid generator parameter: {0}")]
    InvalidParameter(String),
    #[error("no expansivity signature at the probed points")]
    ExpansivitySignatureAbsent,
    #[error("sampling resolution exhausted at level {0}")]
    ResolutionExhausted(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, GeoError>;

impl From<std::io::Error> for GeoError {
    fn from(e: std::io::Error) -> Self {
        GeoError::Io(e.to_string())
    }
}
