use thiserror::Error;

/// Errors produced by walk construction, evolution, and analysis.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter or state violates an operation's preconditions.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A probability profile is too delocalized for arc-based moments.
    #[error("state not localized: {0}")]
    NotLocalized(String),

    /// No qualifying local maximum was found inside the search window.
    #[error("search horizon exceeded: {0}")]
    SearchHorizonExceeded(String),

    /// Too few data points for the requested fit.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// The initial state has appreciable mass outside the active subgraph.
    #[error("inconsistent initial state: {0}")]
    InconsistentInitialState(String),
}

pub type Result<T> = std::result::Result<T, Error>;
