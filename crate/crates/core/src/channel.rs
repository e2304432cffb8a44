//! Phase-damping channels in Gram-matrix form.
//!
//! A phase-damping channel on an `N`-level system acts as `ρ' = D ⋆ ρ`, the
//! entry-wise product with a positive semi-definite matrix `D` of unit
//! diagonal. Writing `D` as the Gram matrix of normalized dynamical vectors
//! `a_1 … a_N` gives the convention used everywhere in this crate:
//!
//! ```text
//! D[m][n] = ⟨a_n|a_m⟩ = Σ_i conj(a_n[i]) · a_m[i]
//! ```
//!
//! so row `m` of a Cholesky factor `D = L L†` is the vector `a_m`. The
//! component array `a[i][n]` (component `i` of vector `n`) is also the list of
//! diagonal Kraus operators `K_i = diag(a[i][0], …, a[i][N-1])`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{self, CMatrix, CVector, ONE};
use crate::random;

/// Default tolerance for Hermiticity, unit diagonal and the relative
/// eigenvalue floor.
pub const DEFAULT_VALIDATION_TOL: f64 = 1e-9;
/// Default relative pivot threshold for the rank-revealing Cholesky.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;
/// Allowed deviation of a dynamical vector norm from one before it is rejected.
pub const DEFAULT_NORM_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is not Hermitian: |M[{row}][{col}] - conj(M[{col}][{row}])| = {defect:e}")]
    NotHermitian { row: usize, col: usize, defect: f64 },
    #[error("diagonal entry {index} is {value} instead of 1")]
    DiagonalNotUnit { index: usize, value: Complex64 },
    #[error("matrix is not positive semi-definite: eigenvalue {eigenvalue:e}")]
    NotPositiveSemidefinite { eigenvalue: f64 },
    #[error("off-diagonal entry ({row}, {col}) has modulus {modulus} > 1")]
    OffDiagonalExceedsOne { row: usize, col: usize, modulus: f64 },
    #[error("density matrix trace is {trace} instead of 1")]
    TraceNotOne { trace: Complex64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dynamical vector {index} has norm {norm}")]
    UnnormalizedVector { index: usize, norm: f64 },
    #[error("Kraus operator {operator} has off-diagonal entry ({row}, {col}) of modulus {magnitude:e}")]
    NonDiagonalKraus { operator: usize, row: usize, col: usize, magnitude: f64 },
    #[error("rank {rank} is outside 1..={dimension}")]
    InvalidRank { dimension: usize, rank: usize },
    #[error("empty operator set")]
    Empty,
}

/// A validated phase-damping channel matrix `D`.
///
/// Stored Hermitian with an exact unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    matrix: CMatrix,
}

impl ChannelMatrix {
    /// Wraps a matrix already known to be a valid channel, snapping the
    /// diagonal to one and the lower triangle to the conjugate upper triangle.
    pub(crate) fn from_trusted(mut matrix: CMatrix) -> Self {
        let n = matrix.nrows();
        for i in 0..n {
            matrix[(i, i)] = ONE;
            for j in i + 1..n {
                matrix[(j, i)] = matrix[(i, j)].conj();
            }
        }
        Self { matrix }
    }

    /// The identity channel (all-ones matrix).
    pub fn identity(n: usize) -> Self {
        Self { matrix: CMatrix::from_element(n, n, ONE) }
    }

    /// Complete dephasing: every coherence is destroyed.
    pub fn complete_dephasing(n: usize) -> Self {
        Self { matrix: CMatrix::identity(n, n) }
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn entry(&self, m: usize, n: usize) -> Complex64 {
        self.matrix[(m, n)]
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    /// Simultaneous permutation of rows and columns: `out[i][j] = D[p[i]][p[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.dimension();
        assert_eq!(perm.len(), n);
        Self { matrix: CMatrix::from_fn(n, n, |i, j| self.matrix[(perm[i], perm[j])]) }
    }
}

/// Diagnostic numbers gathered before any accept/reject decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationSummary {
    pub dimension: usize,
    pub hermitian_defect: f64,
    pub diagonal_defect: f64,
    pub min_eigenvalue: f64,
    pub spectral_norm: f64,
    pub max_off_diagonal: f64,
}

fn check_square_finite(m: &CMatrix) -> Result<(), ChannelError> {
    if m.nrows() != m.ncols() {
        return Err(ChannelError::NotSquare { rows: m.nrows(), cols: m.ncols() });
    }
    if let Some(((row, col), _)) = linalg::indexed(m).find(|(_, z)| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(ChannelError::NonFinite { row, col });
    }
    Ok(())
}

fn worst_diagonal(m: &CMatrix) -> (f64, usize) {
    (0..m.nrows())
        .map(|i| ((m[(i, i)] - ONE).norm(), i))
        .fold((0.0, 0), |acc, cur| if cur.0 > acc.0 { cur } else { acc })
}

/// Measures every channel invariant without rejecting anything.
pub fn inspect_channel(m: &CMatrix) -> Result<ValidationSummary, ChannelError> {
    check_square_finite(m)?;
    let spec = linalg::spectrum(m);
    Ok(ValidationSummary {
        dimension: m.nrows(),
        hermitian_defect: linalg::hermitian_defect(m).0,
        diagonal_defect: worst_diagonal(m).0,
        min_eigenvalue: spec.min,
        spectral_norm: spec.norm,
        max_off_diagonal: linalg::off_diagonal_max(m),
    })
}

/// Validates `m` as a phase-damping channel matrix.
///
/// Hermiticity and the unit diagonal are checked to absolute tolerance `tol`;
/// the smallest eigenvalue must be at least `-tol · ‖m‖₂`.
pub fn validate_channel(m: &CMatrix, tol: f64) -> Result<ChannelMatrix, ChannelError> {
    check_square_finite(m)?;
    let (defect, (row, col)) = linalg::hermitian_defect(m);
    if defect > tol {
        return Err(ChannelError::NotHermitian { row, col, defect });
    }
    let (diag_defect, index) = worst_diagonal(m);
    if diag_defect > tol {
        return Err(ChannelError::DiagonalNotUnit { index, value: m[(index, index)] });
    }
    let spec = linalg::spectrum(m);
    if !spec.is_psd(tol) {
        return Err(ChannelError::NotPositiveSemidefinite { eigenvalue: spec.min });
    }
    let n = m.nrows();
    for i in 0..n {
        for j in i + 1..n {
            let modulus = m[(i, j)].norm();
            if modulus > 1.0 + tol {
                return Err(ChannelError::OffDiagonalExceedsOne { row: i, col: j, modulus });
            }
        }
    }
    Ok(ChannelMatrix::from_trusted(linalg::hermitize(m)))
}

/// Outcome of [`repair_channel`].
#[derive(Debug, Clone)]
pub struct Repair {
    pub channel: ChannelMatrix,
    /// Frobenius distance between the input and the repaired matrix.
    pub distance: f64,
}

/// Projects a near-valid matrix onto the set of channel matrices.
///
/// Hermitizes, clips negative eigenvalues to zero and rescales to a unit
/// diagonal. Never invoked implicitly by validation.
pub fn repair_channel(m: &CMatrix) -> Result<Repair, ChannelError> {
    check_square_finite(m)?;
    let n = m.nrows();
    let (vals, vecs) = linalg::hermitian_eigen(m);
    let clipped = DVector::from_iterator(n, vals.iter().map(|v| Complex64::new(v.max(0.0), 0.0)));
    let psd = &vecs * CMatrix::from_diagonal(&clipped) * vecs.adjoint();
    let mut scale = Vec::with_capacity(n);
    for i in 0..n {
        let d = psd[(i, i)].re;
        if d <= 0.0 {
            return Err(ChannelError::DiagonalNotUnit { index: i, value: psd[(i, i)] });
        }
        scale.push(1.0 / d.sqrt());
    }
    let repaired = CMatrix::from_fn(n, n, |i, j| psd[(i, j)] * scale[i] * scale[j]);
    let channel = ChannelMatrix::from_trusted(repaired);
    let distance = (channel.matrix() - m).norm();
    Ok(Repair { channel, distance })
}

/// A validated density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(m: CMatrix, tol: f64) -> Result<Self, ChannelError> {
        check_square_finite(&m)?;
        let (defect, (row, col)) = linalg::hermitian_defect(&m);
        if defect > tol {
            return Err(ChannelError::NotHermitian { row, col, defect });
        }
        let trace = m.trace();
        if (trace - ONE).norm() > tol {
            return Err(ChannelError::TraceNotOne { trace });
        }
        let spec = linalg::spectrum(&m);
        if !spec.is_psd(tol) {
            return Err(ChannelError::NotPositiveSemidefinite { eigenvalue: spec.min });
        }
        Ok(Self { matrix: linalg::hermitize(&m) })
    }

    /// `|ψ⟩⟨ψ|` for a normalized `ψ`.
    pub fn pure(psi: &CVector, tol: f64) -> Result<Self, ChannelError> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > tol {
            return Err(ChannelError::UnnormalizedVector { index: 0, norm });
        }
        Ok(Self { matrix: psi * psi.adjoint() })
    }

    pub fn maximally_mixed(n: usize) -> Self {
        Self { matrix: CMatrix::identity(n, n).map(|z| z / n as f64) }
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }
}

/// `ρ' = D ⋆ ρ`.
pub fn apply_channel(d: &ChannelMatrix, rho: &DensityMatrix) -> Result<DensityMatrix, ChannelError> {
    if d.dimension() != rho.dimension() {
        return Err(ChannelError::DimensionMismatch { expected: d.dimension(), found: rho.dimension() });
    }
    Ok(DensityMatrix { matrix: linalg::hadamard(d.matrix(), rho.matrix()) })
}

/// Concatenation of two phase-damping channels (entry-wise product).
pub fn compose(d1: &ChannelMatrix, d2: &ChannelMatrix) -> Result<ChannelMatrix, ChannelError> {
    if d1.dimension() != d2.dimension() {
        return Err(ChannelError::DimensionMismatch { expected: d1.dimension(), found: d2.dimension() });
    }
    Ok(ChannelMatrix::from_trusted(linalg::hadamard(d1.matrix(), d2.matrix())))
}

/// `N` normalized dynamical vectors of common length `r`.
///
/// Stored as the `r × N` component array whose column `n` is `a_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalVectorSet {
    components: CMatrix,
    residual: f64,
}

impl DynamicalVectorSet {
    /// Builds a set from the `r × N` component array, re-normalizing each
    /// column. Columns whose norm differs from one by more than `tol` are
    /// rejected; the largest accepted deviation is kept as
    /// [`normalization_residual`](Self::normalization_residual).
    pub fn from_components(components: CMatrix, tol: f64) -> Result<Self, ChannelError> {
        if let Some(((row, col), _)) =
            linalg::indexed(&components).find(|(_, z)| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(ChannelError::NonFinite { row, col });
        }
        let mut components = components;
        let mut residual = 0.0_f64;
        for n in 0..components.ncols() {
            let norm = components.column(n).norm();
            if (norm - 1.0).abs() > tol || norm == 0.0 {
                return Err(ChannelError::UnnormalizedVector { index: n, norm });
            }
            residual = residual.max((norm - 1.0).abs());
            components.column_mut(n).unscale_mut(norm);
        }
        Ok(Self { components, residual })
    }

    /// Builds a set from individual vectors of equal length.
    pub fn from_vectors(vectors: &[CVector], tol: f64) -> Result<Self, ChannelError> {
        let r = vectors.first().map(|v| v.len()).ok_or(ChannelError::Empty)?;
        if let Some(v) = vectors.iter().find(|v| v.len() != r) {
            return Err(ChannelError::DimensionMismatch { expected: r, found: v.len() });
        }
        Self::from_components(CMatrix::from_columns(vectors), tol)
    }

    pub fn count(&self) -> usize {
        self.components.ncols()
    }

    pub fn ambient_dimension(&self) -> usize {
        self.components.nrows()
    }

    pub fn vector(&self, n: usize) -> CVector {
        self.components.column(n).into_owned()
    }

    pub fn vectors(&self) -> impl Iterator<Item = CVector> + '_ {
        self.components.column_iter().map(|c| c.into_owned())
    }

    /// The `r × N` array `a[i][n]`.
    pub fn components(&self) -> &CMatrix {
        &self.components
    }

    /// Largest `|‖a_n‖ - 1|` seen before re-normalization.
    pub fn normalization_residual(&self) -> f64 {
        self.residual
    }
}

/// Dynamical vectors from the rank-revealing Cholesky factor of `D`.
///
/// The pivot threshold is `rank_tol · max(diag D)`; the factor is returned in
/// the original basis order so vector `n` belongs to basis state `n`.
pub fn cholesky_vectors(d: &ChannelMatrix, rank_tol: f64) -> Result<DynamicalVectorSet, ChannelError> {
    let m = d.matrix();
    let max_diag = (0..m.nrows()).map(|i| m[(i, i)].re).fold(0.0, f64::max);
    let fac = linalg::pivoted_cholesky(m, rank_tol * max_diag)
        .map_err(|p| ChannelError::NotPositiveSemidefinite { eigenvalue: p.value })?;
    let components = fac.unpermuted().transpose();
    // truncation removes at most rank_tol from each squared norm
    DynamicalVectorSet::from_components(components, rank_tol.sqrt().max(DEFAULT_NORM_TOL))
}

/// `D[m][n] = ⟨a_n|a_m⟩`.
pub fn gram(v: &DynamicalVectorSet) -> ChannelMatrix {
    let a = v.components();
    ChannelMatrix::from_trusted(a.transpose() * a.conjugate())
}

/// Diagonal Kraus operators of a phase-damping channel.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausSet {
    operators: Vec<CMatrix>,
}

impl KrausSet {
    pub fn new(operators: Vec<CMatrix>) -> Result<Self, ChannelError> {
        let n = operators.first().map(|k| k.nrows()).ok_or(ChannelError::Empty)?;
        for k in &operators {
            if k.nrows() != k.ncols() {
                return Err(ChannelError::NotSquare { rows: k.nrows(), cols: k.ncols() });
            }
            if k.nrows() != n {
                return Err(ChannelError::DimensionMismatch { expected: n, found: k.nrows() });
            }
        }
        Ok(Self { operators })
    }

    pub fn operators(&self) -> &[CMatrix] {
        &self.operators
    }

    pub fn dimension(&self) -> usize {
        self.operators[0].nrows()
    }

    /// `‖Σ K†K − 1‖_max`.
    pub fn trace_preservation_defect(&self) -> f64 {
        let n = self.dimension();
        let sum = self.operators.iter().fold(CMatrix::zeros(n, n), |acc, k| acc + k.adjoint() * k);
        (sum - CMatrix::identity(n, n)).camax()
    }

    /// `‖Σ KK† − 1‖_max`.
    pub fn unitality_defect(&self) -> f64 {
        let n = self.dimension();
        let sum = self.operators.iter().fold(CMatrix::zeros(n, n), |acc, k| acc + k * k.adjoint());
        (sum - CMatrix::identity(n, n)).camax()
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &CMatrix) -> CMatrix {
        let n = self.dimension();
        self.operators.iter().fold(CMatrix::zeros(n, n), |acc, k| acc + k * rho * k.adjoint())
    }
}

/// `K_i = diag(a[i][0], …, a[i][N-1])`.
pub fn kraus_from_vectors(v: &DynamicalVectorSet) -> KrausSet {
    let a = v.components();
    let operators = a.row_iter().map(|row| CMatrix::from_diagonal(&row.transpose())).collect();
    KrausSet { operators }
}

/// Inverse of [`kraus_from_vectors`]; rejects non-diagonal operators and sets
/// that are not trace preserving.
pub fn vectors_from_kraus(k: &KrausSet, tol: f64) -> Result<DynamicalVectorSet, ChannelError> {
    let n = k.dimension();
    for (idx, op) in k.operators().iter().enumerate() {
        for ((row, col), z) in linalg::indexed(op) {
            if row != col && z.norm() > tol {
                return Err(ChannelError::NonDiagonalKraus { operator: idx, row, col, magnitude: z.norm() });
            }
        }
    }
    let components = CMatrix::from_fn(k.operators().len(), n, |i, j| k.operators()[i][(j, j)]);
    DynamicalVectorSet::from_components(components, tol)
}

/// Gram matrix of `n` unit vectors drawn uniformly from the complex unit
/// sphere in dimension `r`. Deterministic for a given seed.
pub fn random_channel(n: usize, r: usize, seed: u64) -> Result<ChannelMatrix, ChannelError> {
    if r == 0 || r > n {
        return Err(ChannelError::InvalidRank { dimension: n, rank: r });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let components = DMatrix::from_columns(&(0..n).map(|_| random::unit_vector(&mut rng, r)).collect::<Vec<_>>());
    let v = DynamicalVectorSet { components, residual: 0.0 };
    Ok(gram(&v))
}
