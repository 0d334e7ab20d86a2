use thiserror::Error;

/// Errors surfaced by the library. Configuration and domain errors are always
/// reported before any sampling or enumeration starts.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Graph or experiment parameters violate their invariants.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A function argument lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exhaustive routine was asked for an instance above its size guard.
    #[error("size guard: {what} = {value} exceeds limit {limit}")]
    SizeGuard {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    /// Malformed edge-list, sidecar or experiment file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A Monte Carlo trial failed; carries enough to replay it.
    #[error("trial failed in cell {cell} (trial {trial}, seed {master}/{stream}): {msg}")]
    Trial {
        cell: String,
        trial: u64,
        master: u64,
        stream: u64,
        msg: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
