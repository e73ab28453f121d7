use thiserror::Error;

use crate::measure::SettingPair;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("probabilities must sum to 1 (got {sum})")]
    NotNormalized { sum: f64 },
    #[error("probability at position {index} is invalid: {value}")]
    InvalidProbability { index: usize, value: f64 },
    #[error("{outcomes} outcomes but {weights} weights")]
    LengthMismatch { outcomes: usize, weights: usize },
    #[error("outcome at position {index} is a duplicate")]
    DuplicateOutcome { index: usize },
    #[error("cannot condition on an event of probability zero")]
    ZeroProbabilityEvent,
    #[error("setting pair {0} has probability zero")]
    ZeroProbabilitySetting(SettingPair),
    #[error("setting pair a1b0 must have probability zero (got {0}): those settings would always anti-correlate")]
    SharedSettingActive(f64),
    #[error("angle slots a1 and b0 must coincide for the original Bell variant")]
    SharedAngleMismatch,
    #[error("factorizability fit requires uniform settings p(a_i,b_j) = 1/4")]
    NonUniformSettings,
    #[error("sample count must be at least 1")]
    EmptySample,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed trial series: {0}")]
    MalformedSeries(String),
}
