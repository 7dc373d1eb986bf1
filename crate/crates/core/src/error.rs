use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("evolution time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("density matrix has eigenvalue {eigenvalue:e} below the positivity floor")]
    NumericalPositivity { eigenvalue: f64 },

    #[error("bath rate diverges at B = {b} (2|B| equals the cutoff {omega_c})")]
    SingularRate { b: f64, omega_c: f64 },

    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    QuadratureNotConverged { estimate: f64, error: f64 },
}
