use thiserror::Error;

/// Errors produced by the physics routines.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on the physical inputs was violated.
    #[error("domain error: {0}")]
    Domain(String),
    /// Trajectory integration could not proceed (step underflow, bad field).
    #[error("integration error: {0}")]
    Integration(String),
    /// The wave solver detected an inconsistency (grid under-resolution,
    /// norm drift beyond tolerance).
    #[error("solver error: {0}")]
    Solver(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
