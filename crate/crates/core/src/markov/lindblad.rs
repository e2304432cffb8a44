use num_complex::Complex64;

use super::{anchored_form, divisibility_test, GeneratorMatrix, MarkovError, MarkovOptions, Verdict};
use crate::channel::ChannelMatrix;
use crate::linalg::{self, CMatrix, CVector};

/// Diagonal Hamiltonian `H = Σ ω_n |n⟩⟨n|` and diagonal Lindblad operators
/// `L_i = Σ l_n[i] |n⟩⟨n|`, stacked per basis state as vectors `l_n ∈ C^r`.
#[derive(Debug, Clone, PartialEq)]
pub struct LindbladData {
    frequencies: Vec<f64>,
    /// `r × N`; column `n` is `l_n`.
    vectors: CMatrix,
}

impl LindbladData {
    pub fn new(frequencies: Vec<f64>, vectors: CMatrix) -> Result<Self, MarkovError> {
        if frequencies.len() != vectors.ncols() {
            return Err(MarkovError::InvalidLindblad(format!(
                "{} frequencies for {} Lindblad vectors",
                frequencies.len(),
                vectors.ncols()
            )));
        }
        if frequencies.iter().any(|w| !w.is_finite()) || vectors.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(MarkovError::InvalidLindblad("non-finite entry".into()));
        }
        Ok(Self { frequencies, vectors })
    }

    /// Builds the data from one vector per basis state.
    pub fn from_vectors(frequencies: Vec<f64>, vectors: &[CVector]) -> Result<Self, MarkovError> {
        let r = vectors.first().map_or(0, |v| v.len());
        if vectors.iter().any(|v| v.len() != r) {
            return Err(MarkovError::InvalidLindblad("Lindblad vectors differ in length".into()));
        }
        let m = if vectors.is_empty() { CMatrix::zeros(0, 0) } else { CMatrix::from_columns(vectors) };
        Self::new(frequencies, m)
    }

    pub fn dimension(&self) -> usize {
        self.frequencies.len()
    }

    /// Number of Lindblad operators `r`.
    pub fn rank(&self) -> usize {
        self.vectors.nrows()
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn vector(&self, n: usize) -> CVector {
        self.vectors.column(n).into_owned()
    }

    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }
}

/// `z[m][n] = −i(ω_m − ω_n) + ⟨l_n|l_m⟩ − ½(‖l_m‖² + ‖l_n‖²)`.
pub fn generator_from_lindblad(data: &LindbladData) -> GeneratorMatrix {
    let n = data.dimension();
    let l = data.vectors();
    let overlaps = l.adjoint() * l; // [n][m] = ⟨l_n|l_m⟩
    let w = data.frequencies();
    let z = CMatrix::from_fn(n, n, |i, j| {
        Complex64::new(0.0, -(w[i] - w[j])) + overlaps[(j, i)]
            - Complex64::from(0.5 * (overlaps[(i, i)].re + overlaps[(j, j)].re))
    });
    GeneratorMatrix::from_trusted(z)
}

/// `D[m][n] = exp(z[m][n]·t)`.
pub fn snapshot(z: &GeneratorMatrix, t: f64) -> Result<ChannelMatrix, MarkovError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(MarkovError::InvalidTime(t));
    }
    Ok(ChannelMatrix::from_trusted(z.matrix().map(|v| (v * t).exp())))
}

/// Reconstructs diagonal Lindblad data whose `t = 1` snapshot is `d`.
///
/// The gauge is fixed by anchoring basis state 0: `l_0 = 0` and `ω_0 = 0`.
/// The remaining `l_n` come from a rank-revealing Cholesky factor of the
/// anchored form `G[m][n] = ⟨l_n|l_m⟩` of the channel's logarithm.
pub fn lindblad_from_channel(d: &ChannelMatrix, opts: &MarkovOptions) -> Result<LindbladData, MarkovError> {
    let verdict = divisibility_test(d, opts);
    let z = match verdict.verdict {
        Verdict::Markovian => verdict.generator.expect("Markovian verdicts carry a generator"),
        Verdict::Indeterminate => {
            let (row, col) = verdict.zero_entries[0];
            return Err(MarkovError::ZeroEntry { row, col });
        }
        Verdict::NonMarkovian => {
            return Err(MarkovError::NotMarkovian {
                failing_nu: verdict.failing_nu,
                min_eigenvalue: verdict.min_eigenvalue.or(verdict.limit_min_eigenvalue).unwrap_or(f64::NAN),
            })
        }
    };
    let z = z.matrix();
    let n = d.dimension();
    let g = anchored_form(z);
    let max_diag = (0..n).map(|i| g[(i, i)].re).fold(0.0, f64::max);
    // rates are compared on the scale of a unit-time snapshot
    let tol = opts.rank_tol * max_diag.max(1.0);
    let fac = linalg::pivoted_cholesky(&g, tol)
        .map_err(|p| MarkovError::NotConditionallyPositive { eigenvalue: p.value })?;
    let vectors = fac.unpermuted().transpose();
    let frequencies = (0..n).map(|k| if k == 0 { 0.0 } else { -z[(k, 0)].im }).collect();
    LindbladData::new(frequencies, vectors)
}
