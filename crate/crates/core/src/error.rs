use thiserror::Error;

/// Errors raised by interval construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IntervalError {
    #[error("interval endpoints out of order: lo = {lo}, hi = {hi}")]
    Unordered { lo: f64, hi: f64 },
    #[error("non-finite interval endpoint: [{lo}, {hi}]")]
    NonFinite { lo: f64, hi: f64 },
    #[error("exponent must be positive, got {0}")]
    NonPositiveExponent(f64),
}

/// Top-level error type for the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Interval(#[from] IntervalError),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },

    #[error("correlation matrix is numerically singular (reciprocal condition ~{rcond:.3e}); add a nugget or remove near-duplicate samples")]
    SingularCorrelation { rcond: f64 },

    #[error("duplicate input rows {first} and {second}")]
    DuplicateInput { first: usize, second: usize },

    #[error("kriging fit failed at theta sample {k}: {source}")]
    FitAtSample {
        k: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("every hyper-parameter candidate produced a singular correlation matrix")]
    NoFeasibleBeta,

    #[error("undefined normalisation: {0}")]
    ZeroNormalisation(&'static str),

    #[error("no sidelobe found outside the main lobe")]
    NoSidelobe,

    #[error("dataset error at line {line}, column {column}: {message}")]
    Dataset { line: usize, column: usize, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
