use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the requested quantity
    /// (negative radius, radius past the cut distance, level < 1, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally invalid configuration (zero paths, dt > t_final, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The eigensolver failed to reach its residual target.
    #[error("eigensolver did not converge: {0}")]
    Convergence(String),

    /// A simulation or evolution produced non-finite values.
    #[error("numerical blow-up: {0}")]
    Numerics(String),

    /// Serialized data could not be understood (bad version, wrong shape).
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
