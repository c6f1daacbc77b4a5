use thiserror::Error;

/// Unified error type for every operation in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Geometry or index ranges are structurally invalid (n too small,
    /// reversed interval, missing vertex, edge shorter than the floor, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Inputs are structurally fine but lie outside the operation's domain
    /// (interval not inside the carrier, atom outside the window, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A measure with unbounded support was passed where compact support is
    /// required.
    #[error("window error: {0}")]
    Window(String),

    /// The weight of a degenerate coefficient: nonpositive ellipticity,
    /// vanishing mass, zero initial data, and similar.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A numerical routine failed to converge or met a singular pivot.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A required bracket or root was not found in the supplied range.
    #[error("no bracket: {0}")]
    NoBracket(String),

    /// Configuration file problems; the message names the offending key path.
    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn window(msg: impl Into<String>) -> Self {
        Error::Window(msg.into())
    }
    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
