//! Seeded multiplicative noise `A^δ = [A_ij (1 + δ E_ij)]` with `‖E‖₂ = 1`.

use alloc::format;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg;

/// Real perturbation with independent uniform(-1, 1) entries scaled to unit
/// spectral norm. Deterministic for a given seed and shape.
pub fn unit_noise_matrix(rows: usize, cols: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uniform = Uniform::new(-1.0, 1.0).expect("valid range");
    // column-major fill order is part of the reproducibility contract
    let e = DMatrix::from_fn(rows, cols, |_, _| uniform.sample(&mut rng));
    let norm = linalg::real_spectral_norm(&e);
    if norm > 0.0 {
        e / norm
    } else {
        e
    }
}

/// Applies relative Hadamard noise of level `delta` to `clean`.
///
/// Since `‖A ∘ E‖₂ ≤ ‖A‖₂ ‖E‖₂`, the result satisfies `‖A^δ - A‖₂ ≤ δ‖A‖₂`.
pub fn hadamard_noise(clean: &DMatrix<Complex64>, delta: f64, seed: u64) -> Result<DMatrix<Complex64>> {
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::InvalidParameter(format!("noise level δ = {delta} must be finite and nonnegative")));
    }
    if delta == 0.0 {
        return Ok(clean.clone());
    }
    let e = unit_noise_matrix(clean.nrows(), clean.ncols(), seed);
    Ok(clean.zip_map(&e, |a, eij| a * (1.0 + delta * eij)))
}
