use std::fmt;
use std::io;
use std::path::PathBuf;

/// Errors of the IO and CLI layer.
#[derive(Debug)]
pub enum CliError {
    /// Propagated engine error.
    Core(meshstereo_core::Error),
    /// Underlying IO failure, with the path it concerned.
    Io(PathBuf, io::Error),
    /// A file that exists but does not parse as its format claims.
    Format(PathBuf, String),
    /// Wrong invocation: bad flag values, missing inputs, bad config keys.
    Usage(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(path, e) => write!(f, "{}: {e}", path.display()),
            CliError::Format(path, msg) => write!(f, "{}: {msg}", path.display()),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io(_, e) => Some(e),
            _ => None,
        }
    }
}

impl From<meshstereo_core::Error> for CliError {
    fn from(e: meshstereo_core::Error) -> Self {
        CliError::Core(e)
    }
}
