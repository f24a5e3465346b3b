use thiserror::Error;

use crate::wick_poly::{Parity, Statistics};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("mode index {index} out of range for {n_modes} modes")]
    IndexOutOfRange { index: usize, n_modes: usize },

    #[error("total degree {degree} exceeds the supported maximum of {cap}")]
    DegreeCap { degree: usize, cap: usize },

    #[error("mode count mismatch: expected {expected}, found {found}")]
    ModeMismatch { expected: usize, found: usize },

    #[error("statistics mismatch: expected {expected:?}, found {found:?}")]
    StatisticsMismatch {
        expected: Statistics,
        found: Statistics,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid symmetry: {0}")]
    InvalidSymmetry(String),

    #[error("generator norm {norm} outside the chart domain (< {limit})")]
    ChartDomain { norm: f64, limit: f64 },

    #[error("degenerate state: p-block has {deficiency} singular value(s) below {threshold:e} (smallest {sigma_min:e})")]
    Degenerate {
        sigma_min: f64,
        threshold: f64,
        deficiency: usize,
    },

    #[error("Fock dimension {dim} exceeds the cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("truncation tail {tail:e} exceeds tolerance {tol:e}; raise the cutoff")]
    TruncationTail { tail: f64, tol: f64 },

    #[error("Hamiltonian is not Hermitian (defect {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("polynomial parity {parity:?} is not admissible for {mode}")]
    ParityViolation { mode: String, parity: Parity },

    #[error("invalid Bogoliubov map: form residual {residual:e}")]
    InvalidMap { residual: f64 },

    #[error("minimization did not converge")]
    NotConverged,

    #[error("{0}")]
    InvalidArgument(String),
}
