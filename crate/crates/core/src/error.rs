//! Crate-wide error type with module-qualified messages.

use std::error;
use std::fmt;

/// A type alias for `Result<T, Error>`.
pub type Result<T> = std::result::Result<T, Error>;

/// An error raised by any operation in this crate.
///
/// Every variant carries the name of the module that rejected the input so
/// that failures surfaced through the CLI identify their origin.
#[derive(Clone, Debug)]
pub enum Error {
    /// A precondition on the inputs was violated.
    InvalidInput {
        module: &'static str,
        message: String,
    },
    /// The inputs are structurally valid but numerically degenerate
    /// (e.g. a constant series where a correlation is requested).
    DegenerateInput {
        module: &'static str,
        message: String,
    },
    /// An iterative fit did not converge within its budget.
    FitFailed {
        module: &'static str,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(module: &'static str, message: impl Into<String>) -> Error {
        Error::InvalidInput {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn degenerate(module: &'static str, message: impl Into<String>) -> Error {
        Error::DegenerateInput {
            module,
            message: message.into(),
        }
    }

    pub(crate) fn fit_failed(module: &'static str, message: impl Into<String>) -> Error {
        Error::FitFailed {
            module,
            message: message.into(),
        }
    }

    /// Name of the module that produced the error.
    pub fn module(&self) -> &'static str {
        match self {
            Error::InvalidInput { module, .. }
            | Error::DegenerateInput { module, .. }
            | Error::FitFailed { module, .. } => module,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidInput { module, message } => {
                write!(f, "{module}: invalid input: {message}")
            }
            Error::DegenerateInput { module, message } => {
                write!(f, "{module}: degenerate input: {message}")
            }
            Error::FitFailed { module, message } => {
                write!(f, "{module}: fit failed: {message}")
            }
        }
    }
}

impl error::Error for Error {}
