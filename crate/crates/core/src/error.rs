use thiserror::Error;

/// Everything that can go wrong while building or evolving a mode.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape mismatch: {left}x{left} vs {right}x{right}")]
    Shape { left: usize, right: usize },

    #[error("degenerate mode: E = sqrt(m^2 + p^2) = 0 (m = {mass}, |p| = {momentum}), H is singular")]
    DegenerateMode { mass: f64, momentum: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("ill-conditioned eigenbasis for {matrix}: condition estimate {condition:.3e}")]
    IllConditioned { matrix: String, condition: f64 },

    #[error("matrix {matrix} is not diagonalizable (reconstruction residual {residual:.3e})")]
    NotDiagonalizable { matrix: String, residual: f64 },

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("null charge-form norm <psi|M|psi> = {0:.3e}")]
    NullNorm(f64),

    #[error("fit failed: {reason} (residual {residual:.3e})")]
    Fit { reason: String, residual: f64 },
}

impl Error {
    /// True for the physics the library refuses to model rather than a numerical or usage fault.
    pub fn is_unsupported_physics(&self) -> bool {
        matches!(self, Error::DegenerateMode { .. } | Error::Unsupported(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
