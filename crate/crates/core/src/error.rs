use thiserror::Error;

use crate::states::ParticleCase;

/// Errors raised by state construction, decompositions and classification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state coefficient matrix is zero")]
    ZeroState,

    #[error("symmetry defect {defect:.3e} exceeds tolerance {tol:.3e} for {case} state")]
    SymmetryViolation {
        case: ParticleCase,
        defect: f64,
        tol: f64,
    },

    #[error("input is not square: {rows}x{cols}")]
    NonSquareInput { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("particle case mismatch: expected {expected}, found {found}")]
    CaseMismatch {
        expected: ParticleCase,
        found: ParticleCase,
    },

    #[error("one-particle dimension must be at least 2, got {0}")]
    InvalidDimension(usize),

    #[error("algebra element is not anti-Hermitian (Hermitian part {0:.3e})")]
    NotAntiHermitian(f64),

    #[error("algebra element is not traceless (|tr| = {0:.3e})")]
    NotTraceless(f64),

    #[error("matrix is not special unitary (unitarity defect {unitarity:.3e}, |det - 1| = {det:.3e})")]
    NotSpecialUnitary { unitarity: f64, det: f64 },

    #[error("decomposition did not converge (residual {residual:.3e})")]
    ConvergenceFailure { residual: f64 },

    #[error("input vector is not sorted in descending order or has negative entries")]
    UnsortedInput,

    #[error("invalid stratum: {0}")]
    InvalidStratum(String),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
