use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point outside domain `{domain}`: x = {x:?}, y = {y:?}")]
    Domain {
        domain: String,
        x: Vec<f64>,
        y: Vec<f64>,
    },

    #[error("rank error: {0}")]
    Rank(String),

    #[error("invalid ladder level: {0}")]
    Level(String),

    #[error("regularity failure ({what}) at x = {x:?}, y = {y:?}")]
    Regularity {
        what: String,
        x: Vec<f64>,
        y: Vec<f64>,
    },

    #[error("symmetry violation of {defect:e} at x = {x:?}, y = {y:?}")]
    Symmetry {
        defect: f64,
        x: Vec<f64>,
        y: Vec<f64>,
    },

    #[error("division by vanishing {what} at x = {x:?}, y = {y:?}")]
    Division {
        what: String,
        x: Vec<f64>,
        y: Vec<f64>,
    },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("analytic derivatives unavailable for `{0}`")]
    NotAnalytic(String),

    #[error("unsupported transition {from} -> {to}")]
    UnsupportedTransition { from: String, to: String },

    #[error("object of level {found} passed to a functional on level {expected}")]
    LevelMismatch { expected: String, found: String },

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("sampler for `{0}` could not produce enough points")]
    Sampler(String),
}

pub type Result<T> = std::result::Result<T, Error>;
