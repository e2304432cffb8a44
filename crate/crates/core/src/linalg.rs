//! Dense complex linear algebra used throughout the crate.
//!
//! Hermitian spectra come from nalgebra's symmetric eigensolver, which
//! handles complex Hermitian input. The rank-revealing Cholesky and the
//! pivoted column selection are implemented here because both need to expose
//! their pivot order.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[cfg(test)]
pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest entry of `|m_ij - conj(m_ji)|`, together with its position.
pub fn hermitian_defect(m: &CMatrix) -> (f64, (usize, usize)) {
    let n = m.nrows();
    let mut worst = (0.0, (0, 0));
    for i in 0..n {
        for j in i..n {
            let d = (m[(i, j)] - m[(j, i)].conj()).norm();
            if d > worst.0 {
                worst = (d, (i, j));
            }
        }
    }
    worst
}

/// `(m + m†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).map(|z| z * 0.5)
}

/// Eigenvalues of the Hermitian part of `m`, ascending.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut vals: Vec<f64> = hermitize(m).symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(f64::total_cmp);
    vals
}

/// Eigen-decomposition of the Hermitian part of `m`: `(eigenvalues, eigenvectors as columns)`.
pub fn hermitian_eigen(m: &CMatrix) -> (DVector<f64>, CMatrix) {
    let eig = hermitize(m).symmetric_eigen();
    (eig.eigenvalues, eig.eigenvectors)
}

/// Smallest eigenvalue and spectral norm of a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Spectrum {
    pub min: f64,
    pub norm: f64,
}

pub fn spectrum(m: &CMatrix) -> Spectrum {
    let vals = hermitian_eigenvalues(m);
    let min = vals.first().copied().unwrap_or(0.0);
    let norm = vals.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    Spectrum { min, norm }
}

impl Spectrum {
    /// `min >= -tol * norm`.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.min >= -tol * self.norm
    }
}

/// Entry-wise (Hadamard) product.
pub fn hadamard(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.component_mul(b)
}

/// Largest off-diagonal modulus.
pub fn off_diagonal_max(m: &CMatrix) -> f64 {
    let mut worst = 0.0_f64;
    for ((i, j), z) in indexed(m) {
        if i != j {
            worst = worst.max(z.norm());
        }
    }
    worst
}

pub(crate) fn indexed(m: &CMatrix) -> impl Iterator<Item = ((usize, usize), &Complex64)> {
    let rows = m.nrows();
    m.iter().enumerate().map(move |(k, z)| ((k % rows, k / rows), z))
}

/// Result of a diagonally pivoted Cholesky factorization `P A Pᵀ = L L†`.
#[derive(Debug, Clone)]
pub struct PivotedCholesky {
    /// Lower-trapezoidal factor in pivot order, `n × rank`.
    pub lower: CMatrix,
    /// `perm[i]` is the original index placed at pivot position `i`.
    pub perm: Vec<usize>,
    pub rank: usize,
}

/// A pivot below the negative tolerance was met.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NegativePivot {
    pub index: usize,
    pub value: f64,
}

impl PivotedCholesky {
    /// Factor rows in the original ordering: row `n` satisfies `A = F F†`.
    pub fn unpermuted(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.lower.nrows(), self.rank);
        for (pos, &orig) in self.perm.iter().enumerate() {
            out.set_row(orig, &self.lower.row(pos));
        }
        out
    }
}

/// Rank-revealing Cholesky with diagonal pivoting.
///
/// Elimination stops once the largest remaining Schur-complement pivot falls
/// below `tol`; any remaining pivot below `-tol` is reported as an error. Ties
/// in the pivot choice go to the lowest pivot position.
pub fn pivoted_cholesky(a: &CMatrix, tol: f64) -> Result<PivotedCholesky, NegativePivot> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "pivoted_cholesky requires a square matrix");
    let mut work = hermitize(a);
    let mut lower = CMatrix::zeros(n, n);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = n;

    for k in 0..n {
        let mut pivot = k;
        for j in k + 1..n {
            if work[(j, j)].re > work[(pivot, pivot)].re {
                pivot = j;
            }
        }
        if work[(pivot, pivot)].re < tol {
            for j in k..n {
                let v = work[(j, j)].re;
                if v < -tol {
                    return Err(NegativePivot { index: perm[j], value: v });
                }
            }
            rank = k;
            break;
        }
        if pivot != k {
            work.swap_rows(k, pivot);
            work.swap_columns(k, pivot);
            lower.swap_rows(k, pivot);
            perm.swap(k, pivot);
        }
        let d = work[(k, k)].re.sqrt();
        lower[(k, k)] = Complex64::new(d, 0.0);
        for i in k + 1..n {
            lower[(i, k)] = work[(i, k)] / d;
        }
        for j in k + 1..n {
            let ljk = lower[(j, k)].conj();
            for i in k + 1..n {
                work[(i, j)] -= lower[(i, k)] * ljk;
            }
        }
    }

    let lower = lower.columns(0, rank).into_owned();
    Ok(PivotedCholesky { lower, perm, rank })
}

/// Greedy column selection by pivoted modified Gram-Schmidt.
///
/// Returns the selected column indices in pick order; selection stops when the
/// largest residual norm drops to `rel_tol` times the largest column norm.
pub fn select_independent_columns(m: &DMatrix<f64>, rel_tol: f64) -> Vec<usize> {
    let cols = m.ncols();
    let mut residual: Vec<DVector<f64>> = (0..cols).map(|j| m.column(j).into_owned()).collect();
    let scale = residual.iter().fold(0.0_f64, |acc, c| acc.max(c.norm()));
    let mut picked = Vec::new();
    let mut available: Vec<bool> = vec![true; cols];
    if scale == 0.0 {
        return picked;
    }
    for _ in 0..m.nrows().min(cols) {
        let best = (0..cols)
            .filter(|&j| available[j])
            .map(|j| (j, residual[j].norm()))
            .fold(None, |acc: Option<(usize, f64)>, cur| match acc {
                Some(a) if a.1 >= cur.1 => Some(a),
                _ => Some(cur),
            });
        let Some((j, norm)) = best else { break };
        if norm <= rel_tol * scale {
            break;
        }
        available[j] = false;
        picked.push(j);
        let q = &residual[j] / norm;
        for (k, r) in residual.iter_mut().enumerate() {
            if available[k] {
                // two passes keep the basis orthogonal at rank deficiency
                for _ in 0..2 {
                    let proj = q.dot(r);
                    r.axpy(-proj, &q, 1.0);
                }
            }
        }
    }
    picked
}
