use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested bound state does not exist (beyond critical coupling,
    /// too weak a potential, or a self-consistent loop that ran away).
    #[error("no bound state: {0}")]
    NoBoundState(String),

    /// β = 1 − ε₁₂ − ε₂₁ vanished: the relative-motion kinetic term is gone.
    #[error("singular algebra: {0}")]
    SingularAlgebra(String),

    #[error("operator identity {identity} violated: residual {residual:.3e}")]
    IdentityViolation { identity: String, residual: f64 },

    #[error("no convergence after {iterations} iterations (residual {residual:.3e}): {detail}")]
    Convergence {
        iterations: usize,
        residual: f64,
        detail: String,
    },

    #[error("quadrature refinement failed: {0}")]
    Quadrature(String),

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("singular coordinate transformation: {0}")]
    SingularTransformation(String),

    #[error("degenerate kinetic operator: {0}")]
    DegenerateKinetic(String),

    #[error("line {line}: {message}")]
    Dataset { line: usize, message: String },

    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn is_no_bound_state(&self) -> bool {
        matches!(self, Error::NoBoundState(_))
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
