use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed group spec: unexpected token `{token}`")]
    Parse { token: String },

    #[error("unsupported group kind `{0}`")]
    UnsupportedKind(String),

    #[error("element is not valid for group {group}")]
    Domain { group: String },

    #[error("cannot decode element for group {group}: {reason}")]
    Codec { group: String, reason: String },

    #[error("capacity exceeded: {what} is {size}, limit {limit}")]
    Capacity { what: String, size: u128, limit: u128 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("query budget exceeded: {0}")]
    Budget(String),

    #[error("adversary repeated a derivable query: {0}")]
    ProtocolViolation(String),

    /// The challenge ciphertext was submitted to the decryption oracle.
    #[error("decryption of the challenge ciphertext is refused")]
    Refused,

    /// Control flow for exhaustive enumeration: the run needs a choice
    /// among `n` values that the replayed prefix does not cover.
    #[doc(hidden)]
    #[error("choice among {0} values pending")]
    ChoicePending(u128),

    /// Control flow for exhaustive enumeration: the most recent choice was
    /// thrown away by a resampling loop.
    #[doc(hidden)]
    #[error("choice discarded by resampling")]
    Discarded { raises_flag: bool },
}

impl Error {
    pub(crate) fn domain(group: &impl std::fmt::Display) -> Self {
        Error::Domain {
            group: group.to_string(),
        }
    }
}
