//! Dirichlet Green's function of `-Δ` on the unit disk and its normal
//! derivative on the outer boundary.

use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use nalgebra::DVector;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryGrid, Point};

/// Green's function split into the free-space logarithm and the image term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenEval {
    /// `-(1/2π) ln|x - z|`
    pub singular: f64,
    /// `(1/2π) ln(|z| |x - z*|)` with `z* = z/|z|²`
    pub image: f64,
}

impl GreenEval {
    pub fn value(&self) -> f64 {
        self.singular + self.image
    }
}

/// Image part `(1/4π) ln(1 - 2 x·z + |x|²|z|²)`; smooth and symmetric for
/// interior points, including `z = 0`.
pub fn green_image(x: Point, z: Point) -> f64 {
    (1.0 - 2.0 * x.dot(z) + x.norm_sq() * z.norm_sq()).ln() / (4.0 * PI)
}

pub fn green_parts(x: Point, z: Point) -> Result<GreenEval> {
    x.ensure_interior()?;
    z.ensure_interior()?;
    let d = x.distance(z);
    if d == 0.0 {
        return Err(Error::CoincidentPoints);
    }
    Ok(GreenEval { singular: -d.ln() / TAU, image: green_image(x, z) })
}

/// `G(x, z)` with `-ΔG(·, z) = δ_z` in the disk and `G(·, z) = 0` on the circle.
pub fn green(x: Point, z: Point) -> Result<f64> {
    green_parts(x, z).map(|g| g.value())
}

/// Green's function allowing `x` on the closed disk; used where the boundary
/// value is the point of interest.
pub(crate) fn green_unchecked(x: Point, z: Point) -> f64 {
    -x.distance(z).ln() / TAU + green_image(x, z)
}

/// `∂_ν(z) G(x, z)` for `z = (cos θ_z, sin θ_z)` on the unit circle: the
/// negative Poisson kernel `-(1/2π)(1 - |x|²)/(1 + |x|² - 2|x|cos(θ_x - θ_z))`.
pub fn poisson_normal_derivative(x: Point, theta_z: f64) -> Result<f64> {
    x.ensure_interior()?;
    Ok(poisson_unchecked(x, theta_z))
}

pub(crate) fn poisson_unchecked(x: Point, theta_z: f64) -> f64 {
    let (s, c) = theta_z.sin_cos();
    let r2 = x.norm_sq();
    // |x|cos(θ_x - θ_z) = x·(cos θ_z, sin θ_z)
    -(1.0 - r2) / (TAU * (1.0 + r2 - 2.0 * (x.x * c + x.y * s)))
}

/// Probe `b_z = [∂_ν G(z, θ_k)]_k` over the boundary grid.
pub fn probe_vector(z: Point, grid: &BoundaryGrid) -> Result<DVector<Complex64>> {
    z.ensure_interior()?;
    Ok(DVector::from_iterator(grid.len(), grid.angles().map(|t| Complex64::new(poisson_unchecked(z, t), 0.0))))
}

/// Real probe values, the same numbers as [`probe_vector`].
pub fn probe_values(z: Point, grid: &BoundaryGrid) -> Result<Vec<f64>> {
    z.ensure_interior()?;
    Ok(grid.angles().map(|t| poisson_unchecked(z, t)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn boundary_values_vanish() {
        let z = Point::new(0.5, 0.0);
        for k in 0..16 {
            let x = Point::polar(1.0 - 1e-15, TAU * k as f64 / 16.0);
            assert!(green_unchecked(x, z).abs() < 1e-12);
            assert!(green_unchecked(x, Point::ORIGIN).abs() < 1e-12);
        }
        let x = Point::polar(0.999_999_999_999, 1.0);
        assert!(green(x, z).unwrap().abs() < 1e-12);
    }

    #[test]
    fn origin_source_reduces_to_log() {
        let x = Point::new(0.3, -0.4);
        assert_relative_eq!(green(x, Point::ORIGIN).unwrap(), -(0.5f64).ln() / TAU, epsilon = 1e-15);
    }

    #[test]
    fn green_matches_image_formula() {
        let x = Point::new(0.2, 0.6);
        let z = Point::new(-0.3, 0.1);
        let zs = Point::new(z.x / z.norm_sq(), z.y / z.norm_sq());
        let expected = -x.distance(z).ln() / TAU + (z.norm() * x.distance(zs)).ln() / TAU;
        assert_relative_eq!(green(x, z).unwrap(), expected, epsilon = 1e-14);
    }

    #[test]
    fn green_errors() {
        let p = Point::new(0.1, 0.2);
        assert_eq!(green(p, p), Err(Error::CoincidentPoints));
        assert!(green(Point::new(1.0, 0.0), p).is_err());
        assert!(poisson_normal_derivative(Point::new(0.0, 1.0), 0.0).is_err());
    }

    #[test]
    fn poisson_values() {
        assert_relative_eq!(poisson_normal_derivative(Point::ORIGIN, 1.3).unwrap(), -1.0 / TAU);
        let v = poisson_normal_derivative(Point::new(0.5, 0.0), 0.0).unwrap();
        assert_relative_eq!(v, -3.0 / TAU, epsilon = 1e-15);
        assert_relative_eq!(v, -0.477_464_829_275_686, epsilon = 1e-12);
    }

    #[test]
    fn poisson_integrates_to_minus_one() {
        let grid = BoundaryGrid::default();
        for x in [Point::ORIGIN, Point::new(0.5, 0.0), Point::new(-0.3, 0.6), Point::new(0.1, -0.7)] {
            let s: f64 = grid.angles().map(|t| poisson_unchecked(x, t)).sum::<f64>() * grid.weight();
            // periodic trapezoid error decays like |x|^K
            let tol = 1e-13 + 10.0 * x.norm().powi(grid.len() as i32);
            assert_relative_eq!(s, -1.0, epsilon = tol);
        }
    }

    #[test]
    fn probe_properties() {
        let grid = BoundaryGrid::default();
        let b0 = probe_vector(Point::ORIGIN, &grid).unwrap();
        assert!(b0.iter().all(|v| (v.re + 1.0 / TAU).abs() < 1e-15 && v.im == 0.0));

        let z = Point::new(0.3, 0.2);
        let shift = 5;
        let zr = z.rotated(grid.angle(shift));
        let b = probe_values(z, &grid).unwrap();
        let br = probe_values(zr, &grid).unwrap();
        for k in 0..grid.len() {
            assert_relative_eq!(br[(k + shift) % grid.len()], b[k], epsilon = 1e-13);
        }
        assert!(b.iter().all(|&v| v < 0.0));
    }
}
