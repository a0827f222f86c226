//! Error type shared by all modules.

/// Errors produced by the library and the CLI front-end.
///
/// The CLI maps variants to process exit codes: parse errors exit 2,
/// domain/unit/internal errors exit 3, resolution and cap errors exit 4.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An input violates a physical or mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A unit conversion or dimensioned operation mixed incompatible dimensions.
    #[error("unit error: {0}")]
    Unit(String),

    /// A sampling grid is too coarse (or too narrow) for the requested output.
    #[error("resolution error: {0}")]
    Resolution(String),

    /// An exponential-growth guard was exceeded (inverted-potential duration).
    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    /// A fringe pattern has too few extrema for a contrast measurement.
    #[error("undefined visibility: {0}")]
    UndefinedVisibility(String),

    /// An internal consistency check failed (e.g. uncertainty product
    /// violated beyond numerical slack after propagation).
    #[error("internal consistency error: {0}")]
    Internal(String),

    /// A config file or CLI invocation could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) => 2,
            Error::Domain(_) | Error::Unit(_) | Error::UndefinedVisibility(_) => 3,
            Error::Internal(_) | Error::Io(_) => 3,
            Error::Resolution(_) | Error::CapExceeded(_) => 4,
        }
    }

    /// Short machine-readable kind tag used in the CLI error record.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Unit(_) => "unit",
            Error::Resolution(_) => "resolution",
            Error::CapExceeded(_) => "cap",
            Error::UndefinedVisibility(_) => "visibility",
            Error::Internal(_) => "internal",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
