//! Analysis and synthesis of phase-damping (pure dephasing) channels.
//!
//! A phase-damping channel is stored as its Gram matrix `D`, acting on states
//! by the entry-wise product `ρ' = D ⋆ ρ`. The crate decides whether such a
//! channel is a snapshot of Markovian dynamics, certifies extremality through
//! the Bloch-vector volume criterion, builds environment models (Lindblad data,
//! coherent states, controlled unitaries) and finds decoherence-free subspaces.

pub mod channel;
pub mod diagnostics;
pub mod extremal;
pub mod io;
pub mod linalg;
pub mod markov;
pub mod random;
pub mod symmetry;

pub use channel::{
    apply_channel, cholesky_vectors, compose, gram, inspect_channel, kraus_from_vectors, random_channel,
    repair_channel, validate_channel, vectors_from_kraus, ChannelError, ChannelMatrix, DensityMatrix,
    DynamicalVectorSet, KrausSet, ValidationSummary,
};
pub use diagnostics::Warning;
pub use extremal::{
    build_controlled_unitary_model, extremality_test, gell_mann_basis, EnvironmentModel, Extremality, ExtremalityError,
    ExtremalityOptions, ExtremalityVerdict,
};
pub use linalg::{CMatrix, CVector};
pub use markov::{
    divisibility_test, generator_from_lindblad, hadamard_power, lindblad_from_channel, single_qubit_forms, snapshot,
    GeneratorMatrix, LindbladData, MarkovError, MarkovOptions, MarkovVerdict, Verdict,
};
pub use num_complex::Complex64;
pub use symmetry::{
    detect_dfs, permutation_invariance_check, symmetric_channel, DfsReport, SymmetryError, SymmetrySpec,
};
