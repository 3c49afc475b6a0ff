use thiserror::Error;

/// Errors surfaced by the library. Every failure is typed; no operation
/// silently degrades precision or drops samples.
#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A point lies outside the phase space [0,1).
    #[error("point {0} outside the domain [0,1)")]
    Domain(String),

    /// An exact backend cannot honor the requested horizon.
    #[error("insufficient precision: {0}")]
    Precision(String),

    /// A configured resource cap was exceeded (refinement order, interval
    /// count of iterated preimages, ...).
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// Malformed or inconsistent input (files, stream shapes, flags).
    #[error("invalid input: {0}")]
    Input(String),

    /// A trajectory backend was asked to do something it does not support.
    #[error("backend mismatch: {0}")]
    Backend(String),

    /// Structurally valid input that makes the requested quantity undefined
    /// (e.g. a run-waiting chain with success probability 0 or 1).
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

impl Error {
    /// Stable machine-readable tag, used by the CLI's structured errors.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precision(_) => "precision",
            Error::Resource(_) => "resource",
            Error::Input(_) => "input",
            Error::Backend(_) => "backend",
            Error::Degenerate(_) => "degenerate",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
