//! MUSIC localization of small inclusions from current-gap data.
//!
//! The response matrix pairs voltages `e^{imθ}` with the currents induced by
//! `e^{inθ}`. To leading order it factors as `F = U T Uᵀ` with
//! `U_{m,j} = u₀(x_j, f_m)`, so a sampling point `x` is a component center
//! exactly when `φ_x = (u₀(x, f_0), …, u₀(x, f_N))ᵀ` has no component in the
//! noise subspace of `F`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::{FieldMeta, IndicatorField, Method};
use crate::geometry::{lifting_unchecked, Point, SamplingGrid};
use crate::linalg::Svd;
use crate::operator::{CurrentGapMatrix, Layout};

/// Relative singular-value threshold for the signal subspace.
pub const DEFAULT_RANK_THRESHOLD: f64 = 0.01;

/// Number of singular values with `σ_ℓ >= τ σ_1` (zero for a zero matrix).
pub fn detect_rank(singular_values: &[f64], threshold: f64) -> usize {
    let largest = singular_values.first().copied().unwrap_or(0.0);
    if largest <= 0.0 {
        return 0;
    }
    singular_values.iter().filter(|&&s| s >= threshold * largest).count()
}

/// Square MUSIC matrix with its SVD and detected rank.
#[derive(Debug, Clone)]
pub struct ResponseMatrix {
    matrix: DMatrix<Complex64>,
    svd: Svd,
    rank: usize,
    threshold: f64,
}

impl ResponseMatrix {
    pub fn new(matrix: DMatrix<Complex64>, threshold: f64) -> Result<Self> {
        if !matrix.is_square() || matrix.is_empty() {
            return Err(Error::DimensionMismatch(format!("response matrix must be square, got {:?}", matrix.shape())));
        }
        if !(threshold >= 0.0 && threshold.is_finite()) {
            return Err(Error::InvalidParameter(format!("rank threshold {threshold} must be nonnegative")));
        }
        let svd = Svd::new(&matrix);
        let rank = detect_rank(&svd.singular_values, threshold);
        Ok(Self { matrix, svd, rank, threshold })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.svd.singular_values
    }

    /// Left singular vectors, i.e. orthonormal eigenvectors of `FF*`.
    pub fn left_vectors(&self) -> &DMatrix<Complex64> {
        &self.svd.u
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    /// Highest Fourier index `N` (the matrix is `(N+1) × (N+1)`).
    pub fn order(&self) -> usize {
        self.matrix.nrows() - 1
    }

    pub fn detect_rank(&self, threshold: f64) -> usize {
        detect_rank(&self.svd.singular_values, threshold)
    }

    /// Same matrix with the rank re-detected at a new threshold.
    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.rank = self.detect_rank(threshold);
        self.threshold = threshold;
        self
    }

    /// Overrides the detected rank (e.g. with a known component count).
    pub fn with_rank(mut self, rank: usize) -> Result<Self> {
        if rank > self.matrix.nrows() {
            return Err(Error::InvalidParameter(format!("rank {rank} exceeds matrix size {}", self.matrix.nrows())));
        }
        self.rank = rank;
        Ok(self)
    }

    /// `‖Pφ‖² = Σ_{ℓ > r} |(φ, u_ℓ)|²`, the squared projection onto the noise subspace.
    pub fn noise_projection_sq(&self, phi: &DVector<Complex64>) -> f64 {
        let u = &self.svd.u;
        (self.rank..u.ncols())
            .map(|l| u.column(l).iter().zip(phi.iter()).map(|(ul, p)| p * ul.conj()).sum::<Complex64>().norm_sqr())
            .sum()
    }
}

/// `F_{n,m} = (2π/K) Σ_k e^{imθ_k} [(Λ - Λ₀)e^{inθ}](θ_k)`: the bilinear
/// voltage–current pairing evaluated by a Riemann sum.
pub fn assemble_f_matrix(data: &CurrentGapMatrix) -> Result<DMatrix<Complex64>> {
    let basis = match data.layout() {
        Layout::Responses(b) => b,
        Layout::Nodal => return Err(Error::DimensionMismatch("MUSIC needs response columns, not a nodal matrix".into())),
    };
    let order = basis
        .music_order()
        .ok_or_else(|| Error::DimensionMismatch("MUSIC basis must be exactly n = 0, 1, …, N".into()))?;
    let grid = data.grid();
    let voltages = DMatrix::from_fn(grid.len(), order + 1, |k, m| Complex64::from_polar(1.0, m as f64 * grid.angle(k)));
    Ok(data.matrix().transpose() * voltages * Complex64::new(grid.weight(), 0.0))
}

pub fn assemble_f(data: &CurrentGapMatrix, threshold: f64) -> Result<ResponseMatrix> {
    ResponseMatrix::new(assemble_f_matrix(data)?, threshold)
}

/// `φ_x = (1, |x|e^{iθ}, …, |x|^N e^{iNθ})ᵀ`.
pub fn probe_phi(x: Point, order: usize) -> Result<DVector<Complex64>> {
    x.ensure_interior()?;
    Ok(phi_unchecked(x, order))
}

fn phi_unchecked(x: Point, order: usize) -> DVector<Complex64> {
    let z = x.as_complex();
    let mut v = DVector::from_element(order + 1, Complex64::new(1.0, 0.0));
    for n in 1..=order {
        v[n] = v[n - 1] * z;
    }
    debug_assert!(order == 0 || (v[order] - lifting_unchecked(x, order as i32)).norm() < 1e-12);
    v
}

/// `W_MUSIC(x) = 1 / ‖Pφ_x‖²` over the sampling grid.
pub fn w_music(f: &ResponseMatrix, grid: &SamplingGrid) -> Result<IndicatorField> {
    let size = f.order() + 1;
    if f.rank() >= size {
        return Err(Error::EmptyNoiseSubspace { rank: f.rank() });
    }
    let values: Vec<f64> = grid
        .points()
        .map(|x| 1.0 / f.noise_projection_sq(&phi_unchecked(x, f.order())).max(f64::MIN_POSITIVE))
        .collect();
    let meta = FieldMeta::new(Method::Music)
        .with_param("rank", f.rank() as f64)
        .with_param("rank_threshold", f.threshold())
        .with_param("order", f.order() as f64);
    IndicatorField::new(grid.clone(), values, meta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::extract_peaks;
    use approx::assert_relative_eq;

    #[test]
    fn phi_trivial_cases() {
        let p = probe_phi(Point::ORIGIN, 5).unwrap();
        assert_eq!(p[0], Complex64::new(1.0, 0.0));
        assert!(p.iter().skip(1).all(|v| v.norm() == 0.0));

        let x = Point::polar(0.6, 1.1);
        let n = 20;
        let p = probe_phi(x, n).unwrap();
        let r2: f64 = 0.36;
        assert_relative_eq!(p.norm_squared(), (1.0 - r2.powi(n as i32 + 1)) / (1.0 - r2), max_relative = 1e-13);
        assert!(probe_phi(Point::new(0.4, 0.0), 10).unwrap().iter().all(|v| v.im == 0.0));
        assert!(probe_phi(Point::new(1.0, 0.0), 3).is_err());
    }

    #[test]
    fn rank_rules() {
        assert_eq!(detect_rank(&[0.0, 0.0], 0.01), 0);
        assert_eq!(detect_rank(&[], 0.01), 0);
        assert_eq!(detect_rank(&[10.0, 5.0, 0.05, 0.0], 0.01), 2);
        let zero = ResponseMatrix::new(DMatrix::zeros(4, 4), 0.01).unwrap();
        assert_eq!(zero.rank(), 0);
    }

    #[test]
    fn full_rank_has_no_noise_subspace() {
        let f = ResponseMatrix::new(DMatrix::identity(3, 3), 0.01).unwrap();
        assert_eq!(f.rank(), 3);
        let err = w_music(&f, &SamplingGrid::default()).unwrap_err();
        assert_eq!(err, Error::EmptyNoiseSubspace { rank: 3 });
    }

    #[test]
    fn centered_source_peaks_at_origin() {
        // F = φ₀ φ₀ᵀ for a single component at the origin
        let phi = probe_phi(Point::ORIGIN, 10).unwrap();
        let f = ResponseMatrix::new(&phi * phi.transpose(), 0.01).unwrap();
        assert_eq!(f.rank(), 1);
        let field = w_music(&f, &SamplingGrid::default()).unwrap();
        let peak = extract_peaks(&field, Some(1))[0];
        let h = field.grid().step_x();
        assert!(peak.point.norm() <= h, "peak {} not at the grid point nearest the origin", peak.point);
    }

    #[test]
    fn nodal_data_rejected() {
        let grid = crate::geometry::BoundaryGrid::new(8).unwrap();
        let data = CurrentGapMatrix::nodal(DMatrix::zeros(8, 8), grid, crate::operator::Provenance::Series).unwrap();
        assert!(assemble_f_matrix(&data).is_err());
    }
}
