use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violates an operation's preconditions.
    #[error("domain error: {0}")]
    Domain(String),

    /// A register or matrix would exceed the configured size limit.
    #[error("capacity error: {what} needs {needed} entries, limit is {limit}")]
    Capacity {
        what: &'static str,
        needed: String,
        limit: usize,
    },

    /// Measurement probabilities do not sum to one.
    #[error("numerical integrity error: {0}")]
    Numerical(String),

    /// The quantum readout guard tripped; indicates a convention bug.
    #[error("internal consistency error: {0}")]
    InternalConsistency(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
