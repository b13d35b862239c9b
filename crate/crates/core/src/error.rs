use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("capability limit exceeded: {what} supports n <= {max}, got n = {got}")]
    Capability {
        what: &'static str,
        max: usize,
        got: usize,
    },

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("checkpoint rejected: {0}")]
    Checkpoint(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("run interrupted after {completed} of {total} shards")]
    Interrupted { completed: usize, total: usize },
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Precondition(_) | Error::Checkpoint(_) => 2,
            Error::Capability { .. } => 3,
            Error::Consistency(_) => 4,
            Error::Io(_) | Error::Interrupted { .. } => 1,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_capability(what: &'static str, n: usize, max: usize) -> Result<()> {
    if n > max {
        Err(Error::Capability { what, max, got: n })
    } else {
        Ok(())
    }
}
