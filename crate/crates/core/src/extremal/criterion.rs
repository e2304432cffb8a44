use serde::Serialize;

use super::bloch::{bloch_vector, gell_mann_basis, homogeneous_matrix, volume, BlochVector};
use super::ExtremalityError;
use crate::channel::{cholesky_vectors, ChannelMatrix, DEFAULT_RANK_TOL};
use crate::diagnostics::Warning;
use crate::linalg;

/// Relative volume below which the Bloch simplex counts as degenerate.
pub const DEFAULT_VOLUME_TOL: f64 = 1e-10;
/// Relative residual below which a lifted vector counts as dependent.
pub const DEFAULT_INDEPENDENCE_TOL: f64 = 1e-10;
/// Volumes within this factor of the threshold are flagged.
const CONFIDENCE_BAND: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExtremalityOptions {
    pub rank_tol: f64,
    pub volume_tol: f64,
    pub independence_tol: f64,
}

impl Default for ExtremalityOptions {
    fn default() -> Self {
        Self { rank_tol: DEFAULT_RANK_TOL, volume_tol: DEFAULT_VOLUME_TOL, independence_tol: DEFAULT_INDEPENDENCE_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Extremality {
    Extremal,
    NotExtremal,
    /// `r² > N`: too few projectors to span, the criterion does not apply.
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalityVerdict {
    pub verdict: Extremality,
    /// Signed volume of the Bloch vectors of `subset`, in ascending index
    /// order. `None` for rank one and for inapplicable inputs.
    pub volume: Option<f64>,
    pub volume_threshold: Option<f64>,
    /// Numerical rank `r` of the channel matrix.
    pub rank: usize,
    pub rank_tol: f64,
    /// Rank of the lifted vectors `B_n`; extremal iff it reaches `r²`.
    /// `None` when the criterion does not apply.
    pub lifted_rank: Option<usize>,
    /// Basis indices whose Bloch vectors the volume is taken over.
    pub subset: Vec<usize>,
    /// Extremal with `r ≥ 2`, so not a mixture of unitaries.
    pub non_ru_certificate: bool,
    pub low_confidence: bool,
    pub explanation: String,
    pub warnings: Vec<Warning>,
}

/// Rank `r` and the Bloch vectors (in the `r`-level Gell-Mann basis) of the
/// channel's Cholesky dynamical vectors. Empty for `r = 1`.
pub fn channel_bloch_vectors(d: &ChannelMatrix, rank_tol: f64) -> Result<(usize, Vec<BlochVector>), ExtremalityError> {
    let vectors = cholesky_vectors(d, rank_tol)?;
    let r = vectors.ambient_dimension();
    if r < 2 {
        return Ok((r, Vec::new()));
    }
    let basis = gell_mann_basis(r)?;
    let b = vectors
        .vectors()
        .map(|v| bloch_vector(&v, &basis, 1e-9))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((r, b))
}

/// Extremality through the rank of the lifted Bloch vectors.
///
/// Spanning `R^{r²}` by all `N` lifts is equivalent to some `r²`-subset being
/// independent; one such subset is picked by pivoted Gram-Schmidt and its
/// volume reported. `NotExtremal` does not imply a mixture of unitaries.
pub fn extremality_test(d: &ChannelMatrix, opts: &ExtremalityOptions) -> Result<ExtremalityVerdict, ExtremalityError> {
    let n = d.dimension();
    let (r, b) = channel_bloch_vectors(d, opts.rank_tol)?;
    let mut out = ExtremalityVerdict {
        verdict: Extremality::NotApplicable,
        volume: None,
        volume_threshold: None,
        rank: r,
        rank_tol: opts.rank_tol,
        lifted_rank: None,
        subset: Vec::new(),
        non_ru_certificate: false,
        low_confidence: false,
        explanation: String::new(),
        warnings: Vec::new(),
    };
    if r == 1 {
        out.verdict = Extremality::Extremal;
        out.lifted_rank = Some(1);
        out.subset = vec![0];
        out.explanation = "rank 1: a diagonal unitary, extremal and trivially random-unitary".into();
        return Ok(out);
    }
    let k = r * r;
    if k > n {
        out.explanation = format!(
            "rank {r} needs {k} projectors to span but only {n} exist; the volume criterion cannot certify extremality"
        );
        return Ok(out);
    }

    let lifted = homogeneous_matrix(&b, r);
    let picked = linalg::select_independent_columns(&lifted, opts.independence_tol);
    out.lifted_rank = Some(picked.len());
    let mut subset = picked.clone();
    // pad a deficient selection so a (vanishing) volume can still be quoted
    subset.extend((0..n).filter(|j| !picked.contains(j)).take(k - picked.len()));
    subset.sort_unstable();

    let chosen: Vec<BlochVector> = subset.iter().map(|&j| b[j].clone()).collect();
    let vol = volume(&chosen)?;
    let max_norm = b.iter().map(|v| v.components.norm()).fold(0.0, f64::max);
    let threshold = opts.volume_tol * max_norm.powi(k as i32 - 1);
    out.volume = Some(vol);
    out.volume_threshold = Some(threshold);
    out.subset = subset;

    let nonzero = picked.len() == k && vol.abs() > threshold;
    out.low_confidence = vol.abs() <= threshold * CONFIDENCE_BAND && vol.abs() >= threshold / CONFIDENCE_BAND;
    if out.low_confidence {
        out.warnings.push(Warning::LowConfidence { volume: vol, threshold });
    }
    if nonzero {
        out.verdict = Extremality::Extremal;
        out.non_ru_certificate = true;
        out.explanation = format!(
            "the lifted Bloch vectors span R^{k} (|Vol| = {:.6e}); an extremal channel of rank {r} is not random-unitary",
            vol.abs()
        );
    } else {
        out.verdict = Extremality::NotExtremal;
        let why = if picked.len() < k {
            format!("the lifted Bloch vectors span only {} of {k} dimensions", picked.len())
        } else {
            format!("|Vol| = {:.3e} is below the zero threshold {threshold:.3e}", vol.abs())
        };
        out.explanation = format!("{why}; the channel is not extremal (this does not decide random-unitarity)");
    }
    Ok(out)
}
