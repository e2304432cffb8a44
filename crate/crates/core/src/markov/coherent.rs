use num_complex::Complex64;

use super::{LindbladData, MarkovError};
use crate::channel::ChannelMatrix;
use crate::linalg::{CMatrix, CVector};

/// A phase-weighted multi-mode coherent state `phase · |centroid⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentLabel {
    pub phase: Complex64,
    pub centroid: CVector,
}

impl CoherentLabel {
    pub fn new(phase: Complex64, centroid: CVector) -> Self {
        Self { phase, centroid }
    }

    pub fn modes(&self) -> usize {
        self.centroid.len()
    }
}

/// `⟨β|α⟩ = conj(phase_β)·phase_α·exp(⟨β,α⟩ − ½(‖α‖² + ‖β‖²))`.
pub fn coherent_overlap(alpha: &CoherentLabel, beta: &CoherentLabel) -> Result<Complex64, MarkovError> {
    if alpha.modes() != beta.modes() {
        return Err(MarkovError::ModeCountMismatch { left: alpha.modes(), right: beta.modes() });
    }
    let cross = beta.centroid.dotc(&alpha.centroid);
    let norms = 0.5 * (alpha.centroid.norm_squared() + beta.centroid.norm_squared());
    Ok(beta.phase.conj() * alpha.phase * (cross - norms).exp())
}

/// Environment of `r`-mode coherent states `|α_n(t)⟩ = e^{−iω_n t}|l_n √t⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoherentStateSet {
    pub time: f64,
    pub labels: Vec<CoherentLabel>,
}

impl CoherentStateSet {
    /// `O[m][n] = ⟨α_n|α_m⟩`, the channel convention.
    pub fn overlap_matrix(&self) -> CMatrix {
        let n = self.labels.len();
        CMatrix::from_fn(n, n, |i, j| {
            coherent_overlap(&self.labels[i], &self.labels[j]).expect("labels share the mode count")
        })
    }

    /// The phase-damping channel these relative environment states induce.
    pub fn channel(&self) -> ChannelMatrix {
        ChannelMatrix::from_trusted(self.overlap_matrix())
    }
}

pub fn coherent_states_from_lindblad(data: &LindbladData, t: f64) -> Result<CoherentStateSet, MarkovError> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(MarkovError::InvalidTime(t));
    }
    let root = t.sqrt();
    let labels = (0..data.dimension())
        .map(|n| CoherentLabel {
            phase: Complex64::from_polar(1.0, -data.frequencies()[n] * t),
            centroid: data.vector(n) * Complex64::from(root),
        })
        .collect();
    Ok(CoherentStateSet { time: t, labels })
}
