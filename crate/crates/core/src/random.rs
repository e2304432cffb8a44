//! Seeded sampling helpers shared by generators and tests.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::CVector;

/// Standard complex Gaussian entries `(x + iy)/√2`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, len: usize) -> CVector {
    DVector::from_fn(len, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Uniform sample from the unit sphere of `C^dim`.
pub fn unit_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> CVector {
    loop {
        let v = complex_gaussian(rng, dim);
        let norm = v.norm();
        if norm > 1e-12 {
            return v.unscale(norm);
        }
    }
}
