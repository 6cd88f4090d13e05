use thiserror::Error;

/// Errors raised by the symbol layer, the torus model and the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A symbol or integrand is not decaying fast enough for the requested operation.
    #[error("degree {degree} violates the precondition: {constraint}")]
    DegreeTooHigh {
        degree: f64,
        constraint: &'static str,
    },

    #[error("adaptive quadrature did not converge: {0}")]
    NonConvergent(String),

    #[error("size mismatch: expected {expected} points, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("invalid grid {n_z}x{n_y}: sizes must be even and at least 8")]
    InvalidGrid { n_z: usize, n_y: usize },

    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    /// Homogeneous components are singular at the zero frequency.
    #[error("homogeneous component evaluated at zero frequency")]
    ZeroFrequency,

    /// A log-log fit was requested on data containing an exact zero.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
