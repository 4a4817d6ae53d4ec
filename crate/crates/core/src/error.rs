use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of a mathematical function.
    #[error("domain error in {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },

    /// A system parameter violates one of its invariants.
    #[error("invalid parameter `{key}`: {detail}")]
    InvalidParam { key: &'static str, detail: String },

    /// A scheme was asked to run on a configuration it does not support.
    #[error("configuration error: {0}")]
    Config(String),

    /// Probability-zero input such as an all-zero beamforming vector.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("quadrature did not reach tolerance: {0}")]
    NonConvergence(String),

    /// Requested combination of options has no meaning (e.g. analytic Ben2).
    #[error("invalid combination: {0}")]
    InvalidCombination(String),
}

impl Error {
    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }

    pub(crate) fn param(key: &'static str, detail: impl Into<String>) -> Self {
        Error::InvalidParam {
            key,
            detail: detail.into(),
        }
    }
}
