//! Thin helpers over `nalgebra` for the dense complex algebra used throughout.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Singular value decomposition `A = U Σ Vᴴ` with singular values in
/// descending order.
#[derive(Debug, Clone)]
pub struct Svd {
    pub singular_values: Vec<f64>,
    pub u: DMatrix<Complex64>,
    pub v_t: DMatrix<Complex64>,
}

/// Relative reconstruction residual accepted from a single factorization.
const SVD_RESIDUAL_TOL: f64 = 1e-12;

impl Svd {
    /// Factorizes a rescaled copy and checks `‖UΣVᴴ - A‖ / ‖A‖`. The
    /// bidiagonal iteration with vectors occasionally stalls at 1e-5 accuracy
    /// for particular matrix scales, so a few other scales are tried before
    /// keeping the best attempt.
    pub fn new(matrix: &DMatrix<Complex64>) -> Self {
        let norm = matrix.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Self::attempt(matrix, 1.0).0;
        }
        let mut best: Option<(Self, f64)> = None;
        for factor in [1.0, 1.7, 0.61, 2.9, 0.23] {
            let (svd, residual) = Self::attempt(matrix, factor / norm);
            if residual <= SVD_RESIDUAL_TOL {
                return svd;
            }
            if best.as_ref().is_none_or(|(_, r)| residual < *r) {
                best = Some((svd, residual));
            }
        }
        best.expect("at least one attempt").0
    }

    fn attempt(matrix: &DMatrix<Complex64>, scale: f64) -> (Self, f64) {
        let scaled = matrix * Complex64::new(scale, 0.0);
        let svd = scaled.clone().svd(true, true);
        let values: Vec<f64> = svd.singular_values.iter().map(|s| s / scale).collect();
        let u = svd.u.expect("left vectors requested");
        let v_t = svd.v_t.expect("right vectors requested");

        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
        let singular_values: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        let u = DMatrix::from_fn(u.nrows(), order.len(), |r, c| u[(r, order[c])]);
        let v_t = DMatrix::from_fn(order.len(), v_t.ncols(), |r, c| v_t[(order[r], c)]);

        let mut us = u.clone();
        for (mut col, s) in us.column_iter_mut().zip(&singular_values) {
            col *= Complex64::new(*s, 0.0);
        }
        let norm = matrix.norm();
        let residual = if norm > 0.0 { (us * &v_t - matrix).norm() / norm } else { 0.0 };
        (Self { singular_values, u, v_t }, residual)
    }

    pub fn largest(&self) -> f64 {
        self.singular_values.first().copied().unwrap_or(0.0)
    }

    pub fn left_vector(&self, j: usize) -> DVector<Complex64> {
        self.u.column(j).into_owned()
    }
}

pub fn singular_values(matrix: &DMatrix<Complex64>) -> Vec<f64> {
    let mut values: Vec<f64> = matrix.clone().singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values
}

/// Largest singular value.
pub fn spectral_norm(matrix: &DMatrix<Complex64>) -> f64 {
    if matrix.is_empty() {
        return 0.0;
    }
    singular_values(matrix).first().copied().unwrap_or(0.0)
}

pub fn real_spectral_norm(matrix: &DMatrix<f64>) -> f64 {
    if matrix.is_empty() {
        return 0.0;
    }
    matrix.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Eigenvalues of the Hermitian part `(A + Aᴴ)/2`, ascending.
pub fn hermitian_part_eigenvalues(matrix: &DMatrix<Complex64>) -> Vec<f64> {
    let h = (matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
    let mut values: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

/// `‖A - Aᵀ‖₂ / ‖A‖₂` (plain transpose, no conjugation).
pub fn relative_asymmetry(matrix: &DMatrix<Complex64>) -> f64 {
    let norm = spectral_norm(matrix);
    if norm == 0.0 {
        return 0.0;
    }
    spectral_norm(&(matrix - matrix.transpose())) / norm
}
