use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed or inconsistent input (dimension mismatch, negative cost, index out of range).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An exhaustive routine was asked to enumerate more than it is allowed to.
    #[error("capacity exceeded: {what} has size {size}, limit is {limit}")]
    Capacity {
        what: &'static str,
        size: usize,
        limit: usize,
    },

    /// A documented precondition of an operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Solver configuration is not usable for this instance.
    #[error("configuration error: {0}")]
    Config(String),

    /// A continuous solver or rounding step failed for a particular guessed set.
    #[error("solver failed for guess {guess:?}: {source}")]
    Solver {
        guess: Vec<usize>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    /// True for errors caused by exceeding an enumeration limit, looking
    /// through solver wrappers.
    pub fn is_capacity(&self) -> bool {
        match self {
            Error::Capacity { .. } => true,
            Error::Solver { source, .. } => source.is_capacity(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
