use thiserror::Error;

/// Errors produced by the geometry, basis, assembly and solver layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite surface data at rho = {rho}")]
    Domain { rho: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("basis function {index} lost orthogonality (deviation {deviation:.3e})")]
    NumericalDegeneracy { index: usize, deviation: f64 },

    #[error("matrix is not Hermitian: max |H - H^dagger| = {deviation:.3e}")]
    NotHermitian { deviation: f64 },

    #[error("grid refinement check failed: eps0 = {coarse} at {coarse_grid}, {fine} at {fine_grid}")]
    Accuracy {
        coarse: f64,
        fine: f64,
        coarse_grid: String,
        fine_grid: String,
    },

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit status used by the command-line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse(_) | Error::Io(_) => 1,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
