use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{sites} sites exceeds the dense capacity of {max} sites")]
    Capacity { sites: usize, max: usize },

    #[error("operator is not Hermitian (max |M - M^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate spectrum: coupled levels separated by {gap:e}")]
    Degenerate { gap: f64 },

    #[error("grid too coarse near s = {s}: adjacent overlap {overlap} < 0.9; refine the grid near the gap minimum")]
    GridTooCoarse { s: f64, overlap: f64 },

    #[error("integration accuracy: norm drift {drift:e} exceeds 1e-6 (step {step:e}); use a smaller step")]
    IntegrationAccuracy { drift: f64, step: f64 },

    #[error("nested commutator grew to {terms} Pauli terms (limit 1e6)")]
    TermExplosion { terms: usize },

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable identifier of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "dimension",
            Error::Capacity { .. } => "capacity",
            Error::NotHermitian { .. } => "not_hermitian",
            Error::Domain(_) => "domain",
            Error::Degenerate { .. } => "degenerate",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::IntegrationAccuracy { .. } => "integration_accuracy",
            Error::TermExplosion { .. } => "term_explosion",
            Error::Consistency(_) => "consistency",
            Error::Eigensolver(_) => "eigensolver",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
