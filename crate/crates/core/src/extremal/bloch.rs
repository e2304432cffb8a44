//! Generalized Bloch representation of pure qudit states.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::ExtremalityError;
use crate::linalg::{self, CMatrix, CVector, ONE};

/// Orthogonal traceless Hermitian generators with `tr σ_i σ_j = 2δ_ij`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochBasis {
    dim: usize,
    generators: Vec<CMatrix>,
}

const BASIS_TOL: f64 = 1e-12;

impl BlochBasis {
    /// Validates a user-supplied generator set.
    pub fn from_generators(dim: usize, generators: Vec<CMatrix>, tol: f64) -> Result<Self, ExtremalityError> {
        if dim < 2 {
            return Err(ExtremalityError::InvalidDimension(dim));
        }
        if generators.len() != dim * dim - 1 {
            return Err(ExtremalityError::CountMismatch { expected: dim * dim - 1, found: generators.len() });
        }
        for (i, g) in generators.iter().enumerate() {
            if g.nrows() != dim || g.ncols() != dim {
                return Err(ExtremalityError::DimensionMismatch { expected: dim, found: g.nrows() });
            }
            let (defect, _) = linalg::hermitian_defect(g);
            if defect > tol {
                return Err(ExtremalityError::GeneratorNotHermitian { index: i, defect });
            }
            if g.trace().norm() > tol {
                return Err(ExtremalityError::GeneratorNotTraceless { index: i, trace: g.trace().norm() });
            }
        }
        for i in 0..generators.len() {
            for j in i..generators.len() {
                let v = (&generators[i] * &generators[j]).trace();
                let expected = if i == j { 2.0 } else { 0.0 };
                if (v - Complex64::from(expected)).norm() > tol {
                    return Err(ExtremalityError::BasisNotOrthogonal { i, j, value: v.re });
                }
            }
        }
        Ok(Self { dim, generators })
    }

    pub fn dimension(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[CMatrix] {
        &self.generators
    }
}

/// Generalized Gell-Mann matrices for `C^d`.
///
/// Canonical order: the `d(d−1)/2` symmetric generators `|j⟩⟨k| + |k⟩⟨j|`
/// for `j < k` in lexicographic order, then the antisymmetric
/// `−i|j⟩⟨k| + i|k⟩⟨j|` in the same order, then the diagonal generators
/// `√(2/(l(l+1)))·(Σ_{j<l} |j⟩⟨j| − l|l⟩⟨l|)` for `l = 1 … d−1`.
/// For `d = 2` this is `(σ_x, σ_y, σ_z)`.
pub fn gell_mann_basis(d: usize) -> Result<BlochBasis, ExtremalityError> {
    if d < 2 {
        return Err(ExtremalityError::InvalidDimension(d));
    }
    let i = Complex64::i();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();
    let mut gens = Vec::with_capacity(d * d - 1);
    for &(j, k) in &pairs {
        let mut m = CMatrix::zeros(d, d);
        m[(j, k)] = ONE;
        m[(k, j)] = ONE;
        gens.push(m);
    }
    for &(j, k) in &pairs {
        let mut m = CMatrix::zeros(d, d);
        m[(j, k)] = -i;
        m[(k, j)] = i;
        gens.push(m);
    }
    for l in 1..d {
        let scale = (2.0 / (l * (l + 1)) as f64).sqrt();
        let mut m = CMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = Complex64::from(scale);
        }
        m[(l, l)] = Complex64::from(-(l as f64) * scale);
        gens.push(m);
    }
    BlochBasis::from_generators(d, gens, BASIS_TOL)
}

/// Real coefficients `b_i = tr(σ_i |ψ⟩⟨ψ|)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochVector {
    pub components: DVector<f64>,
}

impl BlochVector {
    pub fn new(components: DVector<f64>) -> Self {
        Self { components }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `(2/d, b)`, the column used in the determinant identity.
    pub fn homogeneous(&self, d: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.len() + 1);
        v[0] = 2.0 / d as f64;
        v.rows_mut(1, self.len()).copy_from(&self.components);
        v
    }

    /// `B = ½(2/d, b)`, the coefficients of `|ψ⟩⟨ψ|` in `(𝟙, σ_1, …)`.
    pub fn lifted(&self, d: usize) -> DVector<f64> {
        self.homogeneous(d) * 0.5
    }
}

pub fn bloch_vector(psi: &CVector, basis: &BlochBasis, tol: f64) -> Result<BlochVector, ExtremalityError> {
    if psi.len() != basis.dimension() {
        return Err(ExtremalityError::DimensionMismatch { expected: basis.dimension(), found: psi.len() });
    }
    let norm = psi.norm();
    if (norm - 1.0).abs() > tol {
        return Err(ExtremalityError::Unnormalized(norm));
    }
    let components = DVector::from_iterator(
        basis.generators().len(),
        basis.generators().iter().map(|g| psi.dotc(&(g * psi)).re),
    );
    Ok(BlochVector { components })
}

/// `Vol(b_1 … b_{k+1}) = det[b_2 − b_1, …, b_{k+1} − b_1] / k!` for `k + 1`
/// vectors in `R^k`. The sign follows the input order; `|Vol|` does not.
pub fn volume(vectors: &[BlochVector]) -> Result<f64, ExtremalityError> {
    let first = vectors.first().ok_or(ExtremalityError::CountMismatch { expected: 1, found: 0 })?;
    let k = first.len();
    if vectors.len() != k + 1 {
        return Err(ExtremalityError::CountMismatch { expected: k + 1, found: vectors.len() });
    }
    if let Some(v) = vectors.iter().find(|v| v.len() != k) {
        return Err(ExtremalityError::DimensionMismatch { expected: k, found: v.len() });
    }
    let diff = DMatrix::from_fn(k, k, |i, j| vectors[j + 1].components[i] - first.components[i]);
    let factorial: f64 = (1..=k).map(|x| x as f64).product();
    Ok(diff.determinant() / factorial)
}

/// The `d² × d²` matrix with columns `(2/d, b_n)`.
pub fn homogeneous_matrix(vectors: &[BlochVector], d: usize) -> DMatrix<f64> {
    let cols: Vec<DVector<f64>> = vectors.iter().map(|v| v.homogeneous(d)).collect();
    DMatrix::from_columns(&cols)
}
