use thiserror::Error;

/// Errors raised by the generators and estimators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("invalid parameter `{field}`: {reason}")]
    Parameter { field: &'static str, reason: String },

    /// An indicator is mathematically undefined on the given input.
    #[error("indicator `{indicator}` is undefined: {reason}")]
    UndefinedIndicator {
        indicator: &'static str,
        reason: String,
    },

    /// A correlation could not be estimated (zero variance, too few samples).
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    /// The requested configuration cannot be realized.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Degenerate segment configuration (collinear overlap).
    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("network is disconnected")]
    Disconnected,

    /// Input data could not be interpreted.
    #[error("invalid input: {0}")]
    Input(String),

    #[error("degenerate population: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            field,
            reason: reason.into(),
        }
    }

    pub(crate) fn undefined(indicator: &'static str, reason: impl Into<String>) -> Self {
        Error::UndefinedIndicator {
            indicator,
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
