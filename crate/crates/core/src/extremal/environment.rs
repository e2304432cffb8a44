use nalgebra::DMatrix;
use num_complex::Complex64;

use super::ExtremalityError;
use crate::channel::{gram, ChannelMatrix, DynamicalVectorSet};
use crate::linalg::{self, CMatrix, CVector};

const OPERATOR_TOL: f64 = 1e-12;
const STATE_TOL: f64 = 1e-9;

/// `exp(−iHt)` for Hermitian `H`, by eigendecomposition.
pub fn matrix_exponential(h: &CMatrix, t: f64) -> Result<CMatrix, ExtremalityError> {
    let scale = h.camax().max(1.0);
    let (defect, (row, col)) = linalg::hermitian_defect(h);
    if defect > 1e-10 * scale {
        return Err(ExtremalityError::NotHermitian { row, col, defect });
    }
    let (values, vectors) = linalg::hermitian_eigen(h);
    let phases = CMatrix::from_diagonal(&values.map(|l| Complex64::from_polar(1.0, -l * t)));
    Ok(&vectors * phases * vectors.adjoint())
}

/// Two `d`-level system qudits A and B coupled diagonally to a `d_R`-level
/// reservoir:
///
/// ```text
/// H = H_S + Σ_ij (κA[i][j] σA_i ⊗ 𝟙 + κB[i][j] 𝟙 ⊗ σB_i) ⊗ σR_j + H_R
/// ```
///
/// System basis states are ordered `n = n_A·d + n_B`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvironmentModel {
    pub qudit_dimension: usize,
    pub reservoir_dimension: usize,
    /// Diagonal `d × d` operators on qudit A.
    pub system_a: Vec<CMatrix>,
    /// Diagonal `d × d` operators on qudit B.
    pub system_b: Vec<CMatrix>,
    /// Hermitian `d_R × d_R` reservoir operators.
    pub reservoir: Vec<CMatrix>,
    /// `len(system_a) × len(reservoir)`.
    pub kappa_a: DMatrix<f64>,
    /// `len(system_b) × len(reservoir)`.
    pub kappa_b: DMatrix<f64>,
    /// Diagonal `d² × d²` system Hamiltonian.
    pub h_system: CMatrix,
    pub h_reservoir: CMatrix,
    pub psi0: CVector,
    pub time: f64,
}

fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(Complex64::from))
}

fn pauli_z() -> CMatrix {
    CMatrix::from_diagonal(&CVector::from_vec(vec![Complex64::from(1.0), Complex64::from(-1.0)]))
}

impl EnvironmentModel {
    /// Qubits coupled through `σ_z ⊗ σ_x` with `κA = 1`, `κB = 0.7`,
    /// `H_R = 0.3σ_z`, `H_S = 0`, `ψ_0 = |0⟩`, `t = 1`.
    pub fn qubit_example() -> Self {
        Self {
            qudit_dimension: 2,
            reservoir_dimension: 2,
            system_a: vec![pauli_z()],
            system_b: vec![pauli_z()],
            reservoir: vec![pauli_x()],
            kappa_a: DMatrix::from_element(1, 1, 1.0),
            kappa_b: DMatrix::from_element(1, 1, 0.7),
            h_system: CMatrix::zeros(4, 4),
            h_reservoir: pauli_z() * Complex64::from(0.3),
            psi0: CVector::from_vec(vec![Complex64::from(1.0), Complex64::from(0.0)]),
            time: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), ExtremalityError> {
        let d = self.qudit_dimension;
        let dr = self.reservoir_dimension;
        let bad = |msg: String| Err(ExtremalityError::InvalidModel(msg));
        if d == 0 || dr == 0 {
            return bad("dimensions must be positive".into());
        }
        if !self.time.is_finite() {
            return bad(format!("time {} is not finite", self.time));
        }
        for (name, ops) in [("system_a", &self.system_a), ("system_b", &self.system_b)] {
            for (k, op) in ops.iter().enumerate() {
                check_diagonal(&format!("{name}[{k}]"), op, d)?;
            }
        }
        check_diagonal("h_system", &self.h_system, d * d)?;
        for (k, op) in self.reservoir.iter().enumerate() {
            check_hermitian(&format!("reservoir[{k}]"), op, dr)?;
        }
        check_hermitian("h_reservoir", &self.h_reservoir, dr)?;
        for (name, kappa, rows) in
            [("kappa_a", &self.kappa_a, self.system_a.len()), ("kappa_b", &self.kappa_b, self.system_b.len())]
        {
            if kappa.nrows() != rows || kappa.ncols() != self.reservoir.len() {
                return bad(format!(
                    "{name} is {}x{}, expected {rows}x{}",
                    kappa.nrows(),
                    kappa.ncols(),
                    self.reservoir.len()
                ));
            }
            if kappa.iter().any(|x| !x.is_finite()) {
                return bad(format!("{name} has a non-finite entry"));
            }
        }
        if self.psi0.len() != dr {
            return Err(ExtremalityError::DimensionMismatch { expected: dr, found: self.psi0.len() });
        }
        let norm = self.psi0.norm();
        if (norm - 1.0).abs().is_nan() || (norm - 1.0).abs() > STATE_TOL {
            return Err(ExtremalityError::Unnormalized(norm));
        }
        Ok(())
    }

    /// Reservoir Hamiltonian `h_n` conditioned on system basis state `n`.
    pub fn conditional_hamiltonian(&self, n: usize) -> CMatrix {
        let d = self.qudit_dimension;
        let (na, nb) = (n / d, n % d);
        let mut h = self.h_reservoir.clone();
        for (j, sigma_r) in self.reservoir.iter().enumerate() {
            let a: f64 = self.system_a.iter().enumerate().map(|(i, s)| self.kappa_a[(i, j)] * s[(na, na)].re).sum();
            let b: f64 = self.system_b.iter().enumerate().map(|(i, s)| self.kappa_b[(i, j)] * s[(nb, nb)].re).sum();
            h += sigma_r * Complex64::from(a + b);
        }
        h
    }
}

fn check_square(name: &str, op: &CMatrix, dim: usize) -> Result<(), ExtremalityError> {
    if op.nrows() != dim || op.ncols() != dim {
        return Err(ExtremalityError::InvalidModel(format!(
            "{name} is {}x{}, expected {dim}x{dim}",
            op.nrows(),
            op.ncols()
        )));
    }
    if op.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
        return Err(ExtremalityError::InvalidModel(format!("{name} has a non-finite entry")));
    }
    Ok(())
}

fn check_diagonal(name: &str, op: &CMatrix, dim: usize) -> Result<(), ExtremalityError> {
    check_square(name, op, dim)?;
    for ((row, col), z) in linalg::indexed(op) {
        if row != col && z.norm() > OPERATOR_TOL {
            return Err(ExtremalityError::NonDiagonalSystemOperator {
                operator: name.to_string(),
                row,
                col,
                magnitude: z.norm(),
            });
        }
        if row == col && z.im.abs() > OPERATOR_TOL {
            return Err(ExtremalityError::NotHermitian { row, col, defect: 2.0 * z.im.abs() });
        }
    }
    Ok(())
}

fn check_hermitian(name: &str, op: &CMatrix, dim: usize) -> Result<(), ExtremalityError> {
    check_square(name, op, dim)?;
    let (defect, (row, col)) = linalg::hermitian_defect(op);
    if defect > OPERATOR_TOL * op.camax().max(1.0) {
        return Err(ExtremalityError::NotHermitian { row, col, defect });
    }
    Ok(())
}

/// Relative reservoir states `ψ_n = e^{−i(H_S)_nn t}·exp(−i h_n t)·ψ_0` and the
/// channel `D[m][n] = ⟨ψ_n|ψ_m⟩` they induce on the two-qudit system.
pub fn build_controlled_unitary_model(
    model: &EnvironmentModel,
) -> Result<(ChannelMatrix, DynamicalVectorSet), ExtremalityError> {
    model.validate()?;
    let d = model.qudit_dimension;
    let t = model.time;
    let psi0 = model.psi0.unscale(model.psi0.norm());
    let states = (0..d * d)
        .map(|n| {
            let u = matrix_exponential(&model.conditional_hamiltonian(n), t)?;
            let phase = Complex64::from_polar(1.0, -model.h_system[(n, n)].re * t);
            Ok(u * &psi0 * phase)
        })
        .collect::<Result<Vec<CVector>, ExtremalityError>>()?;
    let vectors = DynamicalVectorSet::from_vectors(&states, STATE_TOL)?;
    Ok((gram(&vectors), vectors))
}
