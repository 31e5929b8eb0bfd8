use thiserror::Error;

/// Errors raised by the construction, verification and oracle routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The caller supplied an argument that violates an operation precondition.
    #[error("input error: {0}")]
    Input(String),

    /// A text artifact could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A structural precondition of a construction is not met.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A size or search-space budget would be exceeded.
    #[error("resource limit exceeded for {what}: requires {required}, allowed {allowed}")]
    Resource {
        what: String,
        required: u128,
        allowed: u128,
    },

    /// A wall-clock cap on an exhaustive search expired.
    #[error("time limit exceeded for {0}")]
    Timeout(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }

    pub(crate) fn resource(what: impl Into<String>, required: u128, allowed: u128) -> Self {
        Error::Resource {
            what: what.into(),
            required,
            allowed,
        }
    }

    /// True for budget and time-limit failures.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource { .. } | Error::Timeout(_))
    }
}
