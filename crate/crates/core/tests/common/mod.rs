#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use phasedamp::markov::LindbladData;
use phasedamp::{CMatrix, CVector, ChannelMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> CVector {
    CVector::from_fn(len, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * scale
    })
}

pub fn unit(rng: &mut ChaCha8Rng, len: usize) -> CVector {
    let v = gaussian(rng, len, 1.0);
    let n = v.norm();
    v.unscale(n)
}

/// Smallest eigenvalue via nalgebra directly, independent of the crate's helpers.
pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    let h = (m + m.adjoint()) * Complex64::from(0.5);
    h.symmetric_eigen().eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn max_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `D[m][n] = ⟨v_n|v_m⟩` computed entry by entry.
pub fn gram_oracle(vs: &[CVector]) -> CMatrix {
    CMatrix::from_fn(vs.len(), vs.len(), |m, n| vs[n].dotc(&vs[m]))
}

pub fn random_lindblad(rng: &mut ChaCha8Rng, n: usize, r: usize, rate_scale: f64, freq_scale: f64) -> LindbladData {
    let freqs = (0..n).map(|_| rng.random_range(-freq_scale..=freq_scale)).collect();
    let vectors: Vec<CVector> = (0..n).map(|_| gaussian(rng, r, rate_scale)).collect();
    LindbladData::from_vectors(freqs, &vectors).unwrap()
}

/// `Σ_k w_k diag(e^{iφ_k})ρ diag(e^{-iφ_k})` as a channel matrix.
pub fn unitary_mixture(phases: &[Vec<f64>], weights: &[f64]) -> ChannelMatrix {
    let n = phases[0].len();
    let m = CMatrix::from_fn(n, n, |i, j| {
        phases.iter().zip(weights).map(|(p, w)| Complex64::from_polar(*w, p[i] - p[j])).sum()
    });
    phasedamp::validate_channel(&m, 1e-9).unwrap()
}

pub fn qutrit(alpha: f64) -> ChannelMatrix {
    let i = Complex64::i();
    let a = Complex64::from(alpha);
    let one = Complex64::from(1.0);
    let m = CMatrix::from_row_slice(3, 3, &[one, i * a, -i * a, -i * a, one, a, i * a, a, one]);
    phasedamp::validate_channel(&m, 1e-9).unwrap()
}

pub fn real_matrix(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |_, _| rng.sample(StandardNormal))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let a = CMatrix::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im)
    });
    (&a + a.adjoint()) * Complex64::from(0.5)
}

pub fn proptest_config(cases: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config { cases, failure_persistence: None, ..Default::default() }
}
