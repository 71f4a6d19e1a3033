use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    /// An alternating binomial sum could not be evaluated to the required
    /// relative accuracy.
    #[error(
        "numerically unstable evaluation of {quantity} at n={n} \
         (relative error estimate {rel_error:.3e}); use Monte Carlo estimation instead"
    )]
    Stability {
        quantity: &'static str,
        n: usize,
        rel_error: f64,
    },

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("need at least {needed} slots per replication, have {available}")]
    InsufficientSlots { needed: usize, available: usize },

    #[error("empty search range")]
    EmptyRange,
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub fn is_stability(&self) -> bool {
        matches!(self, Error::Stability { .. })
    }
}
