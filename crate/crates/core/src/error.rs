use thiserror::Error;

/// Everything that can go wrong while building or evaluating a measurement.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (anti-Hermitian residual {residual:.3e})")]
    NotHermitian { residual: f64 },

    #[error("matrix is not positive semidefinite (eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("{what} did not converge within {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("states are linearly dependent (smallest Gram eigenvalue {smallest:.3e}, largest {largest:.3e})")]
    DependentStates { smallest: f64, largest: f64 },

    #[error("conditional probabilities are infeasible (largest eigenvalue {max_eigenvalue:.12} > 1)")]
    Infeasible { max_eigenvalue: f64 },

    #[error("operation needs exactly {expected} states, got {found}")]
    WrongArity { expected: usize, found: usize },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("problem too large: {n} states (at most {max} supported)")]
    TooLarge { n: usize, max: usize },

    #[error("Schmidt coefficient {index} is zero")]
    ZeroCoefficient { index: usize },

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// Stable machine-readable name of the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotHermitian { .. } => "not_hermitian",
            Error::NotPsd { .. } => "not_psd",
            Error::Singular => "singular",
            Error::NoConvergence { .. } => "no_convergence",
            Error::DependentStates { .. } => "dependent_states",
            Error::Infeasible { .. } => "infeasible",
            Error::WrongArity { .. } => "wrong_arity",
            Error::Domain(_) => "domain",
            Error::TooLarge { .. } => "too_large",
            Error::ZeroCoefficient { .. } => "zero_coefficient",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidInput(_) => "invalid_input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
