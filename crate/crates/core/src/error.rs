use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension {0}: curves need dimension at least 2")]
    InvalidDimension(usize),

    #[error("parameter {t} lies outside the curve domain [{lo}, {hi}]")]
    Domain { t: String, lo: String, hi: String },

    #[error("derivative order {requested} exceeds smoothness order {supported}")]
    UnsupportedOrder { requested: usize, supported: usize },

    #[error("curve kind {0} has no exact jets")]
    NotExact(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{what} needs {needed} units of work, above the cap of {cap}")]
    SizeCap { what: &'static str, needed: u128, cap: u128 },

    #[error("minimal separation is undefined for a set with fewer than two points")]
    UndefinedSeparation,

    #[error("B is not a subset of A: point {0} is missing from A")]
    SubsetViolation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
