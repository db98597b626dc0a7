use thiserror::Error;

/// Errors raised by the numerical routines and the command-line front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument violates the precondition of the operation.
    #[error("invalid argument: {0}")]
    Validation(String),
    /// A table or loop bound exceeds the configured capacity.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// A parameter lies outside the range where the formula is valid.
    #[error("out of range: {0}")]
    Range(String),
    /// A prime was passed to a local factor defined on another residue class.
    #[error("prime {p} is not in the residue class required by {kind}")]
    ResidueClass { p: u64, kind: String },
    /// No moduli were found in the requested averaging range.
    #[error("empty averaging range: {0}")]
    EmptyRange(String),
    /// A quadrature or fit failed its self-check.
    #[error("accuracy check failed: {0}")]
    Accuracy(String),
    /// Writing an artifact failed.
    #[error("i/o error: {0}")]
    Io(String),
}

/// Machine-readable error category reported by the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Capacity,
    Accuracy,
    Io,
}

impl ErrorCategory {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Validation => 2,
            ErrorCategory::Capacity => 3,
            ErrorCategory::Accuracy => 4,
            ErrorCategory::Io => 5,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Validation => "validation",
            ErrorCategory::Capacity => "capacity",
            ErrorCategory::Accuracy => "accuracy",
            ErrorCategory::Io => "io",
        }
    }
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Validation(_)
            | Error::Range(_)
            | Error::ResidueClass { .. }
            | Error::EmptyRange(_) => ErrorCategory::Validation,
            Error::Capacity(_) => ErrorCategory::Capacity,
            Error::Accuracy(_) => ErrorCategory::Accuracy,
            Error::Io(_) => ErrorCategory::Io,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
