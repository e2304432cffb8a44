//! Markov compatibility of phase-damping channels.
//!
//! A phase-damping channel is a snapshot of Markovian dynamics exactly when
//! it is infinitely divisible under the Hadamard product, provided no entry of
//! `D` vanishes. Divisibility is tested two ways: positivity of the Hadamard
//! roots `D^{∘1/ν}` for `ν = 2 … ν_max`, and the limit criterion that the
//! entry-wise logarithm is conditionally positive semi-definite.
//!
//! Logarithms are taken after the diagonal phase gauge `D'[m][n] =
//! D[m][n]·e^{-i(θ_m − θ_n)}` with `θ_n = arg D[n][0]`. The gauge changes
//! neither positivity nor the conditional quadratic form, and it moves the
//! first row and column onto the positive real axis so that only genuinely
//! non-additive phases are exposed to the branch cut.

mod coherent;
mod lindblad;
mod qubit;

pub use coherent::{coherent_overlap, coherent_states_from_lindblad, CoherentLabel, CoherentStateSet};
pub use lindblad::{generator_from_lindblad, lindblad_from_channel, snapshot, LindbladData};
pub use qubit::{single_qubit_forms, SingleQubitForms};

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::channel::{ChannelError, ChannelMatrix};
use crate::diagnostics::Warning;
use crate::linalg::{self, CMatrix, Spectrum};

pub const DEFAULT_NU_MAX: usize = 64;
pub const DEFAULT_PSD_TOL: f64 = 1e-10;
pub const DEFAULT_BRANCH_TOL: f64 = 1e-6;
/// Entries of modulus at or below this are treated as zero.
pub const DEFAULT_ZERO_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarkovError {
    #[error("entry ({row}, {col}) is zero; its logarithm is undefined")]
    ZeroEntry { row: usize, col: usize },
    #[error("exponent {0} must be positive and finite")]
    InvalidExponent(f64),
    #[error("time {0} must be non-negative and finite")]
    InvalidTime(f64),
    #[error("matrix is not Hermitian: defect {defect:e} at ({row}, {col})")]
    NotHermitian { row: usize, col: usize, defect: f64 },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("generator diagonal entry {index} is {value}, expected 0")]
    NonZeroDiagonal { index: usize, value: Complex64 },
    #[error("generator entry ({row}, {col}) has positive real part {value:e}")]
    GrowingCoherence { row: usize, col: usize, value: f64 },
    #[error("generator is not conditionally positive semi-definite (eigenvalue {eigenvalue:e})")]
    NotConditionallyPositive { eigenvalue: f64 },
    #[error("channel is not Markovian (failing nu {failing_nu:?}, eigenvalue {min_eigenvalue:e})")]
    NotMarkovian { failing_nu: Option<usize>, min_eigenvalue: f64 },
    #[error("coherent labels have {left} and {right} modes")]
    ModeCountMismatch { left: usize, right: usize },
    #[error("overlap modulus {0} exceeds one")]
    ModulusExceedsOne(f64),
    #[error("Lindblad data: {0}")]
    InvalidLindblad(String),
    #[error(transparent)]
    Channel(#[from] ChannelError),
}

/// Knobs for [`divisibility_test`] and [`lindblad_from_channel`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarkovOptions {
    pub nu_max: usize,
    pub psd_tol: f64,
    pub branch_tol: f64,
    pub zero_tol: f64,
    /// Relative pivot threshold when factoring the anchored generator.
    pub rank_tol: f64,
}

impl Default for MarkovOptions {
    fn default() -> Self {
        Self {
            nu_max: DEFAULT_NU_MAX,
            psd_tol: DEFAULT_PSD_TOL,
            branch_tol: DEFAULT_BRANCH_TOL,
            zero_tol: DEFAULT_ZERO_TOL,
            rank_tol: crate::channel::DEFAULT_RANK_TOL,
        }
    }
}

/// Entry-wise power with its branch diagnostics.
#[derive(Debug, Clone)]
pub struct HadamardPower {
    pub matrix: CMatrix,
    pub warnings: Vec<Warning>,
}

fn branch_distance(z: Complex64) -> f64 {
    PI - z.arg().abs()
}

/// `D^{∘t}` on the principal branch of the entry-wise logarithm.
///
/// Only the upper triangle is exponentiated; the lower triangle is its
/// conjugate, so the result stays Hermitian even on the branch cut.
pub fn hadamard_power(d: &ChannelMatrix, t: f64, branch_tol: f64) -> Result<HadamardPower, MarkovError> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(MarkovError::InvalidExponent(t));
    }
    let m = d.matrix();
    let n = d.dimension();
    let mut out = CMatrix::identity(n, n);
    let mut warnings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let z = m[(i, j)];
            if z.norm() == 0.0 {
                return Err(MarkovError::ZeroEntry { row: i, col: j });
            }
            let distance = branch_distance(z);
            if distance <= branch_tol {
                warnings.push(Warning::BranchAmbiguity { row: i, col: j, distance });
            }
            let w = (z.ln() * t).exp();
            out[(i, j)] = w;
            out[(j, i)] = w.conj();
        }
    }
    Ok(HadamardPower { matrix: out, warnings })
}

/// Phase gauge: `(D', θ)` with `D'[m][n] = D[m][n]·e^{-i(θ_m − θ_n)}`, `θ_n = arg D[n][0]`.
pub(crate) fn phase_anchor(d: &ChannelMatrix) -> (ChannelMatrix, Vec<f64>) {
    let n = d.dimension();
    let theta: Vec<f64> = (0..n).map(|k| d.entry(k, 0).arg()).collect();
    let m = CMatrix::from_fn(n, n, |i, j| d.entry(i, j) * Complex64::from_polar(1.0, theta[j] - theta[i]));
    (ChannelMatrix::from_trusted(m), theta)
}

/// Hermitian entry-wise logarithm `Z` with `exp∘Z = D`, taken in the phase
/// gauge of [`phase_anchor`]. `Z[n][0] = ln|D[n][0]| + iθ_n`.
pub(crate) fn gauged_log(d: &ChannelMatrix, branch_tol: f64) -> Result<(CMatrix, Vec<Warning>), MarkovError> {
    let (anchored, theta) = phase_anchor(d);
    let n = d.dimension();
    let mut z = CMatrix::zeros(n, n);
    let mut warnings = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let w = anchored.entry(i, j);
            if w.norm() == 0.0 {
                return Err(MarkovError::ZeroEntry { row: i, col: j });
            }
            let distance = branch_distance(w);
            if distance <= branch_tol {
                warnings.push(Warning::BranchAmbiguity { row: i, col: j, distance });
            }
            let v = w.ln() + Complex64::new(0.0, theta[i] - theta[j]);
            z[(i, j)] = v;
            z[(j, i)] = v.conj();
        }
    }
    Ok((z, warnings))
}

/// `G[m][n] = Z[m][n] − Z[m][0] − Z[0][n] + Z[0][0]`, the quadratic form of
/// `Z` on vectors with zero entry sum, written in the basis `e_m − e_0`.
pub fn anchored_form(z: &CMatrix) -> CMatrix {
    let n = z.nrows();
    CMatrix::from_fn(n, n, |i, j| z[(i, j)] - z[(i, 0)] - z[(0, j)] + z[(0, 0)])
}

/// Spectrum of the anchored form, with the threshold scale `max(‖Z‖₂, 1)`.
///
/// The unit floor measures rates on the scale of a unit-time snapshot, so a
/// vanishing generator is not held to a vanishing tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConditionalSpectrum {
    pub min_eigenvalue: f64,
    pub norm: f64,
}

impl ConditionalSpectrum {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol * self.norm.max(1.0)
    }
}

pub fn conditional_spectrum(z: &CMatrix, tol: f64) -> Result<ConditionalSpectrum, MarkovError> {
    if z.nrows() != z.ncols() {
        return Err(MarkovError::NotSquare { rows: z.nrows(), cols: z.ncols() });
    }
    let (defect, (row, col)) = linalg::hermitian_defect(z);
    let scale = z.iter().fold(1.0_f64, |acc, v| acc.max(v.norm()));
    if defect > tol * scale {
        return Err(MarkovError::NotHermitian { row, col, defect });
    }
    if z.nrows() == 0 {
        return Ok(ConditionalSpectrum { min_eigenvalue: 0.0, norm: 0.0 });
    }
    let g = linalg::spectrum(&anchored_form(z));
    let norm = linalg::spectrum(z).norm;
    Ok(ConditionalSpectrum { min_eigenvalue: g.min, norm })
}

/// `x†Zx ≥ −tol·max(‖Z‖₂, 1)` for every `x` whose entries sum to zero.
pub fn conditional_psd_test(z: &CMatrix, tol: f64) -> Result<bool, MarkovError> {
    Ok(conditional_spectrum(z, tol)?.passes(tol))
}

/// Diagonal generator `L(|m⟩⟨n|) = z[m][n]·|m⟩⟨n|` of Markovian phase damping.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    matrix: CMatrix,
}

impl GeneratorMatrix {
    /// Checks zero diagonal, Hermiticity, `Re z ≤ 0` and conditional
    /// positivity, all to tolerance `tol`.
    pub fn new(m: CMatrix, tol: f64) -> Result<Self, MarkovError> {
        if m.nrows() != m.ncols() {
            return Err(MarkovError::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        let n = m.nrows();
        for i in 0..n {
            if m[(i, i)].norm() > tol {
                return Err(MarkovError::NonZeroDiagonal { index: i, value: m[(i, i)] });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && m[(i, j)].re > tol {
                    return Err(MarkovError::GrowingCoherence { row: i, col: j, value: m[(i, j)].re });
                }
            }
        }
        let spec = conditional_spectrum(&m, tol)?;
        if !spec.passes(tol) {
            return Err(MarkovError::NotConditionallyPositive { eigenvalue: spec.min_eigenvalue });
        }
        Ok(Self::from_trusted(m))
    }

    pub(crate) fn from_trusted(mut matrix: CMatrix) -> Self {
        let n = matrix.nrows();
        for i in 0..n {
            matrix[(i, i)] = Complex64::new(0.0, 0.0);
            for j in i + 1..n {
                matrix[(j, i)] = matrix[(i, j)].conj();
            }
        }
        Self { matrix }
    }

    pub fn dimension(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `(γ, ω)` of the qubit form `z₁₂ = −2γ − iω`, `ω ∈ [0, 2π)`.
    pub fn qubit_parameters(&self) -> Option<(f64, f64)> {
        (self.dimension() == 2).then(|| {
            let z = self.matrix[(0, 1)];
            (-z.re / 2.0, qubit::wrap_angle(-z.im))
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Markovian,
    NonMarkovian,
    Indeterminate,
}

/// Outcome of [`divisibility_test`].
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovVerdict {
    pub verdict: Verdict,
    /// Smallest `ν` whose Hadamard root is not positive semi-definite.
    pub failing_nu: Option<usize>,
    /// Smallest eigenvalue of the root at `failing_nu`.
    pub min_eigenvalue: Option<f64>,
    /// Smallest eigenvalue of the anchored logarithm (limit criterion).
    pub limit_min_eigenvalue: Option<f64>,
    pub generator: Option<GeneratorMatrix>,
    /// Entries treated as zero (upper triangle), which make the verdict indeterminate.
    pub zero_entries: Vec<(usize, usize)>,
    pub warnings: Vec<Warning>,
}

/// Decides whether `d` is the `t = 1` snapshot of a Markovian phase-damping semigroup.
pub fn divisibility_test(d: &ChannelMatrix, opts: &MarkovOptions) -> MarkovVerdict {
    let n = d.dimension();
    let zero_entries: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .filter(|&(i, j)| d.entry(i, j).norm() <= opts.zero_tol)
        .collect();
    if !zero_entries.is_empty() {
        return MarkovVerdict {
            verdict: Verdict::Indeterminate,
            failing_nu: None,
            min_eigenvalue: None,
            limit_min_eigenvalue: None,
            generator: None,
            zero_entries,
            warnings: Vec::new(),
        };
    }

    let (anchored, _) = phase_anchor(d);
    let (z, warnings) = gauged_log(d, opts.branch_tol).expect("zero entries were screened");

    let mut failing = None;
    for nu in 2..=opts.nu_max.max(2) {
        let root = hadamard_power(&anchored, 1.0 / nu as f64, opts.branch_tol).expect("zero entries were screened");
        let spec: Spectrum = linalg::spectrum(&root.matrix);
        if !spec.is_psd(opts.psd_tol) {
            failing = Some((nu, spec.min));
            break;
        }
    }

    let limit = conditional_spectrum(&z, opts.psd_tol).expect("gauged logarithm is Hermitian");
    let limit_ok = limit.passes(opts.psd_tol);
    let markovian = failing.is_none() && limit_ok;

    MarkovVerdict {
        verdict: if markovian { Verdict::Markovian } else { Verdict::NonMarkovian },
        failing_nu: failing.map(|f| f.0),
        min_eigenvalue: failing.map(|f| f.1),
        limit_min_eigenvalue: Some(limit.min_eigenvalue),
        generator: markovian.then(|| GeneratorMatrix::from_trusted(z)),
        zero_entries,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{random_channel, validate_channel};
    use crate::linalg::ONE;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn qutrit(alpha: f64) -> ChannelMatrix {
        let a = alpha;
        let m = CMatrix::from_row_slice(
            3,
            3,
            &[ONE, c(0.0, a), c(0.0, -a), c(0.0, -a), ONE, c(a, 0.0), c(0.0, a), c(a, 0.0), ONE],
        );
        validate_channel(&m, 1e-9).unwrap()
    }

    fn qubit(z: Complex64) -> ChannelMatrix {
        validate_channel(&CMatrix::from_row_slice(2, 2, &[ONE, z, z.conj(), ONE]), 1e-9).unwrap()
    }

    #[test]
    fn power_of_identity_and_real_entry() {
        let id = ChannelMatrix::identity(3);
        assert_eq!(hadamard_power(&id, 0.37, 1e-6).unwrap().matrix, *id.matrix());
        let p = hadamard_power(&qubit(c(0.25, 0.0)), 0.5, 1e-6).unwrap();
        assert_abs_diff_eq!(p.matrix[(0, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.matrix[(0, 1)].im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn qutrit_square_root_has_negative_eigenvalue() {
        let root = hadamard_power(&qutrit(0.4), 0.5, 1e-6).unwrap();
        let min = linalg::spectrum(&root.matrix).min;
        assert_abs_diff_eq!(min, 1.0 - 1.2_f64.sqrt(), epsilon = 1e-12);
        assert_abs_diff_eq!(min, -0.095445, epsilon = 1e-6);
    }

    #[test]
    fn power_errors() {
        let d = ChannelMatrix::complete_dephasing(2);
        assert!(matches!(hadamard_power(&d, 0.5, 1e-6), Err(MarkovError::ZeroEntry { row: 0, col: 1 })));
        assert!(matches!(hadamard_power(&ChannelMatrix::identity(2), -1.0, 1e-6), Err(MarkovError::InvalidExponent(_))));
        let neg = qubit(c(-0.5, 0.0));
        let p = hadamard_power(&neg, 0.5, 1e-6).unwrap();
        assert!(matches!(p.warnings[0], Warning::BranchAmbiguity { row: 0, col: 1, .. }));
        assert_eq!(p.matrix[(1, 0)], p.matrix[(0, 1)].conj());
    }

    #[test]
    fn divisibility_examples() {
        let v = divisibility_test(&qubit(c(0.3, 0.0)), &MarkovOptions::default());
        assert_eq!(v.verdict, Verdict::Markovian);
        assert!(v.generator.is_some());

        let v = divisibility_test(&qutrit(0.4), &MarkovOptions::default());
        assert_eq!(v.verdict, Verdict::NonMarkovian);
        assert_eq!(v.failing_nu, Some(2));
        assert_abs_diff_eq!(v.min_eigenvalue.unwrap(), 1.0 - 1.2_f64.sqrt(), epsilon = 1e-12);

        let v = divisibility_test(&ChannelMatrix::identity(4), &MarkovOptions::default());
        assert_eq!(v.verdict, Verdict::Markovian);
        assert!(v.generator.unwrap().matrix().iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn zero_entries_are_indeterminate() {
        let v = divisibility_test(&ChannelMatrix::complete_dephasing(3), &MarkovOptions::default());
        assert_eq!(v.verdict, Verdict::Indeterminate);
        assert_eq!(v.zero_entries, vec![(0, 1), (0, 2), (1, 2)]);
    }

    // Oracle: positivity of the Hadamard roots up to ν = 10⁴, which
    // approaches the limit criterion from the finite side.
    fn roots_stay_psd(d: &ChannelMatrix, nu_max: usize) -> bool {
        let (anchored, _) = phase_anchor(d);
        [2, 3, 5, 10, 100, 1000, 10_000]
            .iter()
            .filter(|&&nu| nu <= nu_max)
            .all(|&nu| linalg::spectrum(&hadamard_power(&anchored, 1.0 / nu as f64, 1e-6).unwrap().matrix).is_psd(1e-10))
    }

    #[test]
    fn conditional_test_examples() {
        assert!(conditional_psd_test(&CMatrix::zeros(3, 3), 1e-10).unwrap());

        let d = qubit(c(-0.5, -1.0).exp());
        assert!(roots_stay_psd(&d, 10_000));
        let (z, _) = gauged_log(&d, 1e-6).unwrap();
        assert!(conditional_psd_test(&z, 1e-10).unwrap());

        let d = qutrit(0.4);
        assert!(!roots_stay_psd(&d, 10_000));
        let (z, _) = gauged_log(&d, 1e-6).unwrap();
        assert!(!conditional_psd_test(&z, 1e-10).unwrap());

        let mut bad = CMatrix::zeros(2, 2);
        bad[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(conditional_psd_test(&bad, 1e-10), Err(MarkovError::NotHermitian { .. })));
    }

    #[test]
    fn gauged_log_reproduces_channel() {
        let d = random_channel(5, 3, 8).unwrap();
        let (z, _) = gauged_log(&d, 1e-6).unwrap();
        let back = z.map(|w| w.exp());
        assert!((back - d.matrix()).camax() < 1e-12);
    }

    #[test]
    fn generator_validation() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(0.2, 0.0);
        m[(1, 0)] = c(0.2, 0.0);
        assert!(matches!(GeneratorMatrix::new(m, 1e-10), Err(MarkovError::GrowingCoherence { .. })));
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(-0.1, 0.0);
        assert!(matches!(GeneratorMatrix::new(m, 1e-10), Err(MarkovError::NonZeroDiagonal { index: 0, .. })));
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(-0.5, -1.0);
        m[(1, 0)] = c(-0.5, 1.0);
        let g = GeneratorMatrix::new(m, 1e-10).unwrap();
        let (gamma, omega) = g.qubit_parameters().unwrap();
        assert_abs_diff_eq!(gamma, 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(omega, 1.0, epsilon = 1e-15);
    }
}
