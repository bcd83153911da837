//! Closed-form current-gap operator for a concentric circular inclusion of
//! radius `ρ` with constant coefficient `γ`.
//!
//! Outside the inclusion `u = a₀ + b₀ ln r + Σ (a_n r^{|n|} + b_n r^{-|n|}) e^{inθ}`,
//! inside `u = c₀ + Σ c_n r^{|n|} e^{inθ}`. Matching the voltage at `r = 1`,
//! continuity at `r = ρ` and the Robin jump `∂_r u⁺ - ∂_r u⁻ = γu` gives a
//! diagonal current gap: `σ₀` on the constant mode and `|n|(σ_n - 1)` on
//! `e^{inθ}`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::BoundaryGrid;
use crate::linalg;
use crate::operator::{CurrentGapMatrix, Provenance};

/// Reference truncation used by [`truncation_error_report`].
pub const DEFAULT_REFERENCE_ORDER: usize = 40;

fn check_params(radius: f64, gamma: f64) -> Result<()> {
    if !(radius > 0.0 && radius < 1.0) {
        return Err(Error::InvalidParameter(alloc::format!("radius {radius} must lie in (0, 1)")));
    }
    if !(gamma >= 0.0 && gamma.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("γ = {gamma} must be finite and nonnegative")));
    }
    Ok(())
}

/// Per-mode coefficients for unit Fourier datum `f_n = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeCoefficients {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub sigma: f64,
}

fn mode(n: u32, radius: f64, gamma: f64) -> ModeCoefficients {
    if n == 0 {
        let b = gamma * radius / (1.0 - gamma * radius * radius.ln());
        let a = 1.0;
        return ModeCoefficients { a, b, c: a + b * radius.ln(), sigma: b };
    }
    let two_n = 2.0 * n as f64;
    let rho_2n = radius.powi(2 * n as i32);
    let denom = two_n + gamma * radius * (1.0 - rho_2n);
    let a = (two_n + gamma * radius) / denom;
    let b = -gamma * radius * rho_2n / denom;
    ModeCoefficients { a, b, c: a - gamma * radius / denom, sigma: a - b }
}

/// `σ_n` of the boundary current `∂_r u(1, ·) = σ₀ f₀ + Σ |n| σ_n f_n e^{inθ}`.
///
/// For `n ≠ 0`: `(2|n| + γρ(1 + ρ^{2|n|})) / (2|n| + γρ(1 - ρ^{2|n|}))`;
/// for `n = 0`: `γρ / (1 - γρ ln ρ)`.
pub fn mode_eigenvalue(n: i32, radius: f64, gamma: f64) -> Result<f64> {
    check_params(radius, gamma)?;
    Ok(mode(n.unsigned_abs(), radius, gamma).sigma)
}

/// Eigenvalue of `Λ - Λ₀` on `e^{inθ}`: `σ₀` for `n = 0`, `|n|(σ_n - 1)` otherwise.
pub fn current_gap_eigenvalue(n: i32, radius: f64, gamma: f64) -> Result<f64> {
    check_params(radius, gamma)?;
    Ok(gap_eigenvalue(n.unsigned_abs(), radius, gamma))
}

fn gap_eigenvalue(n: u32, radius: f64, gamma: f64) -> f64 {
    if n == 0 {
        return mode(0, radius, gamma).sigma;
    }
    // σ_n - 1 = 2γρ^{2n+1} / (2n + γρ(1 - ρ^{2n})), written without cancellation
    let two_n = 2.0 * n as f64;
    let rho_2n = radius.powi(2 * n as i32);
    n as f64 * 2.0 * gamma * radius * rho_2n / (two_n + gamma * radius * (1.0 - rho_2n))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    radius: f64,
    gamma: f64,
    order: usize,
    modes: Vec<ModeCoefficients>,
    gaps: Vec<f64>,
}

impl SeriesCoefficients {
    /// Coefficients for modes `|n| = 0..=order`.
    pub fn new(radius: f64, gamma: f64, order: usize) -> Result<Self> {
        check_params(radius, gamma)?;
        let modes = (0..=order as u32).map(|n| mode(n, radius, gamma)).collect();
        let gaps = (0..=order as u32).map(|n| gap_eigenvalue(n, radius, gamma)).collect();
        Ok(Self { radius, gamma, order, modes, gaps })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficients of mode `n`; `None` beyond the truncation.
    pub fn mode(&self, n: i32) -> Option<&ModeCoefficients> {
        self.modes.get(n.unsigned_abs() as usize)
    }

    pub fn sigma(&self, n: i32) -> Option<f64> {
        self.mode(n).map(|m| m.sigma)
    }

    /// `σ₀` or `|n|(σ_n - 1)`; zero beyond the truncation.
    pub fn gap_eigenvalue(&self, n: i32) -> f64 {
        self.gaps.get(n.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }
}

/// Truncated kernel `K(θ, φ) = σ₀ + Σ_{1≤|n|≤N} |n|(σ_n - 1) e^{in(θ-φ)}`.
pub fn kernel(theta: f64, phi: f64, coeffs: &SeriesCoefficients) -> Complex64 {
    let d = theta - phi;
    let mut sum = Complex64::new(coeffs.gap_eigenvalue(0), 0.0);
    for n in 1..=coeffs.order as i32 {
        let g = coeffs.gap_eigenvalue(n);
        sum += Complex64::from_polar(g, n as f64 * d) + Complex64::from_polar(g, -(n as f64) * d);
    }
    sum
}

/// Collocation of `(1/2π) ∫ K(θ, φ) f(φ) dφ`: `A_jk = (1/2π) w_k K(θ_j, θ_k)`.
pub fn assemble_series_operator(grid: &BoundaryGrid, coeffs: &SeriesCoefficients) -> Result<CurrentGapMatrix> {
    let k = grid.len();
    // circulant: only the first column needs kernel evaluations
    let column: Vec<Complex64> = (0..k)
        .map(|d| kernel(grid.angle(d), 0.0, coeffs) * (grid.weight() / core::f64::consts::TAU))
        .collect();
    let matrix = DMatrix::from_fn(k, k, |j, l| column[(j + k - l) % k]);
    CurrentGapMatrix::nodal(matrix, *grid, Provenance::Series)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationRow {
    pub order: usize,
    /// Spectral-norm distance to the reference truncation.
    pub error: f64,
    /// `ρ^{2(N+1)} / √(N+1)`.
    pub bound: f64,
}

impl TruncationRow {
    pub fn ratio(&self) -> f64 {
        self.error / self.bound
    }
}

/// Distance between the operator truncated at each `N` and at `reference`.
///
/// Both operators are collocated on a grid fine enough (`2·reference + 2`
/// nodes) to resolve every retained mode without aliasing.
pub fn truncation_error_report(radius: f64, gamma: f64, orders: &[usize], reference: usize) -> Result<Vec<TruncationRow>> {
    check_params(radius, gamma)?;
    if let Some(&bad) = orders.iter().find(|&&n| n >= reference) {
        return Err(Error::InvalidParameter(alloc::format!(
            "truncation {bad} must be below the reference order {reference}"
        )));
    }
    let grid = BoundaryGrid::new(2 * reference + 2)?;
    let full = assemble_series_operator(&grid, &SeriesCoefficients::new(radius, gamma, reference)?)?;
    orders
        .iter()
        .map(|&order| {
            let truncated = assemble_series_operator(&grid, &SeriesCoefficients::new(radius, gamma, order)?)?;
            let error = linalg::spectral_norm(&(full.matrix() - truncated.matrix()));
            let m = (order + 1) as f64;
            Ok(TruncationRow { order, error, bound: radius.powi(2 * (order as i32 + 1)) / m.sqrt() })
        })
        .collect()
}
