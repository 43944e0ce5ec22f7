use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped so a front end can map them onto distinct exit
/// codes: configuration problems, solver size limits, and malformed input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("unequal-ratios: IFS maps must share one contraction ratio (found {first} and {other})")]
    UnequalRatios { first: f64, other: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {index} lies outside the space's bounding box")]
    OutOfBounds { index: usize },

    #[error("{op} requires at least {min} points, got {found}")]
    TooFewPoints {
        op: &'static str,
        min: usize,
        found: usize,
    },

    #[error("size-limit: {solver} supports {min} <= n <= {max}, got n = {n}")]
    SizeLimit {
        solver: &'static str,
        min: usize,
        max: usize,
        n: usize,
    },

    #[error("invalid tour: {0}")]
    InvalidTour(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate regression: {0}")]
    DegenerateRegression(String),

    #[error("ball radius {radius} exceeds the space diameter {diameter}")]
    RadiusExceedsDiameter { radius: f64, diameter: f64 },

    #[error("mismatched inputs: {0}")]
    Mismatch(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short stable tag for tabular output.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::InvalidSpace(_) => "invalid-space",
            Error::UnequalRatios { .. } => "unequal-ratios",
            Error::DimensionMismatch { .. } => "dimension-mismatch",
            Error::OutOfBounds { .. } => "out-of-bounds",
            Error::TooFewPoints { .. } => "too-few-points",
            Error::SizeLimit { .. } => "size-limit",
            Error::InvalidTour(_) => "invalid-tour",
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DegenerateRegression(_) => "degenerate-regression",
            Error::RadiusExceedsDiameter { .. } => "radius-exceeds-diameter",
            Error::Mismatch(_) => "mismatch",
            Error::Config(_) => "config",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::Parse(format!("csv: {other:?}")),
        }
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Parse(format!("toml: {e}"))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("json: {e}"))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
