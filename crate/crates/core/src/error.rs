use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the domain an operation accepts.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The parameter is meaningful but not supported by the exact analysis
    /// (for example a non-integer Nakagami factor).
    #[error("unsupported parameter `{name}`: {reason}")]
    Unsupported { name: &'static str, reason: String },

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical routine `{routine}` did not converge: {detail}")]
    NonConvergence { routine: &'static str, detail: String },

    /// The scenario cannot be evaluated (e.g. an interferer sits on the receiver).
    #[error("degenerate scenario: {0}")]
    Degenerate(String),

    /// Configuration document problems, tagged with the offending key path.
    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            reason: reason.into(),
        }
    }

    /// Short machine-readable tag used in CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid_parameter",
            Error::Unsupported { .. } => "unsupported",
            Error::NonConvergence { .. } => "non_convergence",
            Error::Degenerate(_) => "degenerate",
            Error::Config { .. } => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
