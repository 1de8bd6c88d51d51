use thiserror::Error;

use crate::lie::{Group, SignPattern};

#[derive(Debug, Error)]
pub enum Error {
    #[error("signature ({0}, {1}, {2}) is not a Milnor signature; entries must be -1, 0 or +1")]
    UnknownSignature(i64, i64, i64),

    #[error("unknown group name `{0}`")]
    UnknownGroup(String),

    #[error("invalid sign pattern `{0}`; expected three characters from {{+, -}}")]
    InvalidSignPattern(String),

    #[error("metric coefficient {index} is zero; the metric is singular")]
    ZeroCoefficient { index: usize },

    #[error("t = {t} lies outside the existence interval; the solution blows up at t = {blowup_time}")]
    BeyondBlowup { t: f64, blowup_time: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("ratio relation is degenerate at a/c = 1")]
    DegenerateRatio,

    #[error("{operation} is not available for {group}")]
    UnsupportedGroup { group: Group, operation: &'static str },

    #[error("no printed curvature formula for {group} with signs {signs}")]
    UnsupportedSignature { group: Group, signs: SignPattern },

    #[error("configuration mismatch: {0}")]
    Config(String),

    #[error("invalid integrator settings: {0}")]
    Settings(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
