use thiserror::Error;

/// Errors produced by the distribution routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A grid is malformed or does not match the walk it is used with.
    #[error("grid error: {0}")]
    Grid(String),
    /// A numerical integral did not reach its error target.
    #[error("convergence error in {context}: estimated error {error:e} exceeds target {target:e}")]
    Convergence {
        context: &'static str,
        error: f64,
        target: f64,
    },
    /// An operation that needs data received none.
    #[error("empty input")]
    EmptyInput,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
