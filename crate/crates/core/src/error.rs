use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Two values that must agree on shape (entity count, right count,
    /// fill length, ...) do not.
    #[error("arity mismatch for {what}: expected {expected}, found {found}")]
    Arity {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("index out of range: {what} {index} (limit {limit})")]
    OutOfRange {
        what: &'static str,
        index: usize,
        limit: usize,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("instance too large for exhaustive search: {0}")]
    SizeLimit(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// A decoded model or solver answer is inconsistent with the instance.
    #[error("integrity violation: {0}")]
    Integrity(String),

    #[error("external solver: {0}")]
    Solver(String),

    #[error("no policy with at most {m} domains exists; retry with a larger budget (e.g. --m {})", 2 * m)]
    Infeasible { m: usize },

    #[error("timed out after {seconds:.1}s")]
    Timeout { seconds: f64 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(path: &str, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
