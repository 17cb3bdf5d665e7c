//! Error type shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong while building or analysing kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    #[error("matrix is not Hermitian (residual {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not unitary (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("kernel eigenvalue {0:.6e} is negative; no Kraus form exists")]
    NegativeEigenvalue(f64),

    #[error("kernel transfer matrix is singular")]
    SingularKernel,

    #[error("ensembles do not share a density matrix (deviation {0:.3e})")]
    EnsembleMismatch(f64),

    #[error("noise data violates linearity in the direction argument (residual {0:.3e})")]
    LinearityViolation(f64),

    #[error("family member is not transfer-unitary (residual {0:.3e})")]
    NonUnitaryFamily(f64),

    #[error("negative noise strength {0:.6e} along the requested direction")]
    NegativeDelta(f64),

    #[error("integration step too large (one-step error estimate {0:.3e})")]
    StepTooLarge(f64),

    #[error("probabilities sum to {0}, expected 1")]
    ProbabilitySum(f64),

    #[error("matrix is not positive semidefinite (minimum eigenvalue {0:.6e})")]
    NotPositive(f64),

    #[error("kernels are not mutual inverses (residual {0:.3e})")]
    NotInverse(f64),

    #[error("kernel does not factorize over the given subsystems (residual {0:.3e})")]
    NonFactorized(f64),

    #[error("internal contract violated: {0}")]
    ContractViolation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
