use thiserror::Error;

use crate::classify::PearsonType;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("degenerate sample: all values are equal (mu2 = 0)")]
    DegenerateSample,

    #[error("invalid moments: {0}")]
    InvalidMoments(String),

    #[error(
        "fit failure for type {pearson_type} Pearson distribution: {parameter} = {value} {reason}"
    )]
    FitFailure {
        pearson_type: PearsonType,
        parameter: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error(
        "numerical integration did not converge: value {value}, error estimate {error_estimate}"
    )]
    NonConvergence { value: f64, error_estimate: f64 },

    #[error("root search did not converge: {0}")]
    RootNotFound(String),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("invalid plot options: {0}")]
    InvalidOptions(String),
}

impl Error {
    /// True for failures of the numerical machinery rather than of the input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::FitFailure { .. } | Error::NonConvergence { .. } | Error::RootNotFound(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
