use thiserror::Error;

/// Errors raised by the solver and its configuration layer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// Density or pressure left the admissible set.
    #[error("positivity failure: {0}")]
    Positivity(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported order: {0}")]
    UnsupportedOrder(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl SolverError {
    pub fn is_positivity(&self) -> bool {
        matches!(self, SolverError::Positivity(_))
    }

    /// Prefixes the message with `ctx`, keeping the variant.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            SolverError::InvalidState(m) => SolverError::InvalidState(format!("{ctx}: {m}")),
            SolverError::Positivity(m) => SolverError::Positivity(format!("{ctx}: {m}")),
            SolverError::Config(m) => SolverError::Config(format!("{ctx}: {m}")),
            SolverError::UnsupportedOrder(m) => SolverError::UnsupportedOrder(format!("{ctx}: {m}")),
            SolverError::Io(m) => SolverError::Io(format!("{ctx}: {m}")),
        }
    }
}

impl From<std::io::Error> for SolverError {
    fn from(e: std::io::Error) -> Self {
        SolverError::Io(e.to_string())
    }
}

pub type Result<T, E = SolverError> = std::result::Result<T, E>;
