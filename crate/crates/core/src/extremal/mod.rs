//! Extremality of phase-damping channels and non-random-unitary synthesis.
//!
//! With dynamical vectors `a_1 … a_N ∈ C^r`, the channel is extremal among
//! unital channels exactly when the projectors `|a_n⟩⟨a_n|` span the `r²`
//! dimensional space of `r × r` Hermitian matrices. In the generalized Bloch
//! representation `|a_n⟩⟨a_n| = B_n · (𝟙, σ_1, …)` with `B_n = ½(2/r, b_n)`,
//! so for `N = r²` the condition is a nonzero simplex volume of the `b_n`.
//! An extremal channel of rank `r ≥ 2` is not a mixture of unitaries.

mod bloch;
mod criterion;
mod environment;

pub use bloch::{bloch_vector, gell_mann_basis, homogeneous_matrix, volume, BlochBasis, BlochVector};
pub use criterion::{
    channel_bloch_vectors, extremality_test, Extremality, ExtremalityOptions, ExtremalityVerdict,
    DEFAULT_INDEPENDENCE_TOL, DEFAULT_VOLUME_TOL,
};
pub use environment::{build_controlled_unitary_model, matrix_exponential, EnvironmentModel};

use thiserror::Error;

use crate::channel::ChannelError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtremalityError {
    #[error("dimension {0} is below 2")]
    InvalidDimension(usize),
    #[error("expected {expected} vectors or generators, found {found}")]
    CountMismatch { expected: usize, found: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("state has norm {0} instead of 1")]
    Unnormalized(f64),
    #[error("generator {index} is not Hermitian (defect {defect:e})")]
    GeneratorNotHermitian { index: usize, defect: f64 },
    #[error("generator {index} has trace of modulus {trace:e}")]
    GeneratorNotTraceless { index: usize, trace: f64 },
    #[error("tr(σ_{i} σ_{j}) = {value}, basis is not orthonormal")]
    BasisNotOrthogonal { i: usize, j: usize, value: f64 },
    #[error("matrix is not Hermitian (defect {defect:e} at ({row}, {col}))")]
    NotHermitian { row: usize, col: usize, defect: f64 },
    #[error("{operator} has off-diagonal entry ({row}, {col}) of modulus {magnitude:e}")]
    NonDiagonalSystemOperator { operator: String, row: usize, col: usize, magnitude: f64 },
    #[error("environment model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}
