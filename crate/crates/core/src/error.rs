use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("empty point set")]
    EmptySet,
    #[error("degenerate line: stroke endpoints coincide")]
    DegenerateLine,
    #[error("element kind mismatch")]
    KindMismatch,
    #[error("insufficient elements: need at least 2 valid elements, found {found}")]
    InsufficientElements { found: usize },
    #[error("insufficient points: need at least 2, got {0}")]
    InsufficientPoints(usize),
    #[error("overlap undefined: both lines have zero projected length on the bisector")]
    UndefinedOverlap,
    #[error("degenerate distribution: all points coincide")]
    DegenerateDistribution,
    #[error("duplicate draw index {0}")]
    DuplicateDrawIndex(u32),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error at {path} (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported document version {0}")]
    UnsupportedVersion(u32),
    #[error("image error: {0}")]
    Image(String),
}
