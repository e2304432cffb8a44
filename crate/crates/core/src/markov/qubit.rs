use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::Serialize;

use super::{LindbladData, MarkovError};
use crate::linalg::CVector;

/// The two standard parametrizations of a single-qubit coherence `c`:
/// `c = e^{−2γ − iω}` and `c = (2p − 1)·e^{−iθ}`.
///
/// Branches: `ω, θ ∈ [0, 2π)` and `p ≥ ½`, so `θ = ω` whenever `c ≠ 0`.
/// `gamma` is `None` for `c = 0` (complete dephasing, infinite rate).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingleQubitForms {
    #[serde(skip)]
    pub c: Complex64,
    pub gamma: Option<f64>,
    pub omega: f64,
    pub p: f64,
    pub theta: f64,
}

pub(crate) fn wrap_angle(x: f64) -> f64 {
    let w = x.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w.abs()
    }
}

pub fn single_qubit_forms(c: Complex64, tol: f64) -> Result<SingleQubitForms, MarkovError> {
    let modulus = c.norm();
    if !modulus.is_finite() || modulus > 1.0 + tol {
        return Err(MarkovError::ModulusExceedsOne(modulus));
    }
    let modulus = modulus.min(1.0);
    let omega = if modulus == 0.0 { 0.0 } else { wrap_angle(-c.arg()) };
    Ok(SingleQubitForms {
        c,
        gamma: (modulus > 0.0).then(|| -modulus.ln() / 2.0),
        omega,
        p: (1.0 + modulus) / 2.0,
        theta: omega,
    })
}

impl SingleQubitForms {
    /// Symmetric two-mode Lindblad data: `ω_{1,2} = ±ω/2`,
    /// `l_1 = √γ(1, 1)`, `l_2 = √γ(1, −1)`.
    pub fn lindblad_data(&self) -> Option<LindbladData> {
        let g = self.gamma?.sqrt();
        let l1 = CVector::from_vec(vec![Complex64::from(g), Complex64::from(g)]);
        let l2 = CVector::from_vec(vec![Complex64::from(g), Complex64::from(-g)]);
        Some(LindbladData::from_vectors(vec![self.omega / 2.0, -self.omega / 2.0], &[l1, l2]).expect("well-formed"))
    }

    /// `e^{−2γ − iω}`.
    pub fn exponential_form(&self) -> Complex64 {
        match self.gamma {
            Some(g) => Complex64::new(-2.0 * g, -self.omega).exp(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// `(2p − 1)·e^{−iθ}`.
    pub fn pauli_form(&self) -> Complex64 {
        Complex64::from_polar(2.0 * self.p - 1.0, -self.theta)
    }
}
