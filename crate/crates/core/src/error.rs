use thiserror::Error;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// A scenario parameter failed validation. `field` names the offending key.
    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    /// A Gram matrix lost rank (pivot under the relative threshold).
    #[error("singular Gram matrix: pivot {pivot:e} at step {step} below threshold {threshold:e}")]
    Singular {
        step: usize,
        pivot: f64,
        threshold: f64,
    },

    /// A matrix or scalar input carried NaN or infinity.
    #[error("non-finite input: {0}")]
    NonFinite(String),

    /// Exhaustive search would enumerate more subsets than allowed.
    #[error(
        "exhaustive search over C({users}, {served}) = {subsets} subsets exceeds budget {budget}"
    )]
    BudgetExceeded {
        users: usize,
        served: usize,
        subsets: u128,
        budget: u128,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line front end: 2 for configuration
    /// and domain problems, 3 for numerical failures, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Config { .. } | Error::BudgetExceeded { .. } => 2,
            Error::Singular { .. } | Error::NonFinite(_) => 3,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
