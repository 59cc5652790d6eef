use thiserror::Error;

use crate::algebra::ModeLabel;

/// Errors reported by state-algebra and measurement operations.
#[derive(Clone, Debug, PartialEq, Error)]
pub enum Error {
    /// A kernel was handed a non-square matrix.
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquareMatrix { rows: usize, cols: usize },

    /// Two states cannot be combined (slot count, particle count or
    /// statistics mismatch).
    #[error("incompatible states: {0}")]
    Incompatible(String),

    /// The requested state is annihilated by the Pauli exclusion principle,
    /// or the protocol is undefined for fermions.
    #[error("Pauli-forbidden scheme: {0}")]
    PauliForbidden(String),

    /// A mode cannot be split off as a tensor factor.
    #[error("mode {mode} is not factorizable: {reason}")]
    NotFactorizable { mode: ModeLabel, reason: String },

    /// The partial trace is undefined for this state and mode partition.
    #[error("state is not reducible: {0}")]
    NotReducible(String),

    /// An operation that needs a nonzero norm was applied to a zero state.
    #[error("zero-norm state: {0}")]
    ZeroNorm(String),
}

pub type Result<T> = std::result::Result<T, Error>;
