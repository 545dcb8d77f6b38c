use thiserror::Error;

/// Error type shared by the whole toolkit.
#[derive(Debug, Clone, Error)]
pub enum KerrError {
    /// A caller-supplied value violates a precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numerical routine failed to meet its accuracy contract.
    #[error("numerical failure: {context} (residual {residual:.3e})")]
    Numerical { context: String, residual: f64 },

    /// Quadrature refinement stopped before reaching the requested tolerance.
    #[error("quadrature did not converge: achieved {achieved:.3e}, requested {requested:.3e}")]
    QuadratureNotConverged { achieved: f64, requested: f64 },

    /// A quantity exceeded the error budget allowed for Fock-space truncation.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// An information matrix is singular or too close to singular to invert.
    #[error("degenerate statistical model: {0}")]
    DegenerateModel(String),

    /// Reading configuration or writing results failed.
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for KerrError {
    fn from(e: std::io::Error) -> Self {
        KerrError::Io(e.to_string())
    }
}

impl From<csv::Error> for KerrError {
    fn from(e: csv::Error) -> Self {
        KerrError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, KerrError>;

impl KerrError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        KerrError::InvalidInput(msg.into())
    }

    /// Process exit code used by the command-line frontend.
    pub fn exit_code(&self) -> i32 {
        match self {
            KerrError::InvalidInput(_) | KerrError::Io(_) => 1,
            _ => 2,
        }
    }
}
