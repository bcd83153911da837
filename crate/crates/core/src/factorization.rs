//! Regularized factorization method: noisy data, filtered range test and the
//! normalized imaging functional `W`.

use alloc::format;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::{FieldMeta, IndicatorField, Method};
use crate::geometry::{Point, SamplingGrid};
use crate::greens::poisson_unchecked;
use crate::linalg::Svd;
use crate::noise::hadamard_noise;
use crate::operator::{CurrentGapMatrix, Layout};

pub use crate::contour::level_set;

/// Default `α` for the concentric-disc scenarios.
pub const DEFAULT_ALPHA_CIRCULAR: f64 = 1e-7;
/// Default `α` for general geometries.
pub const DEFAULT_ALPHA_GENERAL: f64 = 1e-5;

/// Nodal data matrix with multiplicative noise and the SVD of the noisy copy.
#[derive(Debug, Clone)]
pub struct NoisySystem {
    clean: CurrentGapMatrix,
    delta: f64,
    seed: u64,
    noisy: DMatrix<Complex64>,
    svd: Svd,
}

/// `A^δ = A ∘ (1 + δE)` with `‖E‖₂ = 1`. Response-layout data is first
/// converted to the nodal `K × K` form.
pub fn apply_noise(clean: &CurrentGapMatrix, delta: f64, seed: u64) -> Result<NoisySystem> {
    let clean = match clean.layout() {
        Layout::Nodal => clean.clone(),
        Layout::Responses(_) => clean.to_nodal()?,
    };
    let noisy = hadamard_noise(clean.matrix(), delta, seed)?;
    let svd = Svd::new(&noisy);
    Ok(NoisySystem { clean, delta, seed, noisy, svd })
}

impl NoisySystem {
    pub fn clean(&self) -> &CurrentGapMatrix {
        &self.clean
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn noisy(&self) -> &DMatrix<Complex64> {
        &self.noisy
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.svd.singular_values
    }

    pub fn largest_singular_value(&self) -> f64 {
        self.svd.largest()
    }

    /// The same system with `A^δ` replaced by `s A^δ` (no re-drawn noise).
    pub fn scaled(&self, s: f64) -> Result<Self> {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::InvalidParameter(format!("scale {s} must be positive")));
        }
        let noisy = &self.noisy * Complex64::new(s, 0.0);
        let svd = Svd::new(&noisy);
        Ok(Self { clean: self.clean.clone(), delta: self.delta, seed: self.seed, noisy, svd })
    }

    /// `(u_j, b)` for every left singular vector.
    fn coefficients(&self, b: &DVector<Complex64>) -> Vec<f64> {
        let u = &self.svd.u;
        (0..u.ncols())
            .map(|j| u.column(j).iter().zip(b.iter()).map(|(uj, bk)| uj.conj() * bk).sum::<Complex64>().norm_sqr())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FilterSpec {
    Tikhonov { alpha: f64 },
    /// `α = 1/m` for `m` iterations; `β` defaults to `1/(2σ₁²)`.
    Landweber { alpha: f64, beta: Option<f64> },
    SpectralCutoff { alpha: f64 },
}

impl FilterSpec {
    pub fn name(&self) -> &'static str {
        match self {
            FilterSpec::Tikhonov { .. } => "tikhonov",
            FilterSpec::Landweber { .. } => "landweber",
            FilterSpec::SpectralCutoff { .. } => "spectral_cutoff",
        }
    }

    pub fn alpha(&self) -> f64 {
        match *self {
            FilterSpec::Tikhonov { alpha } | FilterSpec::Landweber { alpha, .. } | FilterSpec::SpectralCutoff { alpha } => alpha,
        }
    }

    /// Checks the parameter ranges that do not depend on the data.
    pub fn validate(&self) -> Result<()> {
        let alpha = self.alpha();
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!("{} needs α > 0, got {alpha}", self.name())));
        }
        if let FilterSpec::Landweber { beta, .. } = *self {
            let m = 1.0 / alpha;
            if m < 1.0 - 1e-9 || (m - m.round()).abs() > 1e-9 * m.max(1.0) {
                return Err(Error::InvalidParameter(format!("Landweber α = {alpha} is not 1/m for a positive integer m")));
            }
            if let Some(b) = beta {
                if !(b > 0.0 && b.is_finite()) {
                    return Err(Error::InvalidParameter(format!("Landweber β = {b} must be positive")));
                }
            }
        }
        Ok(())
    }

    /// Fills in the default Landweber step and checks `β < 1/σ₁²`.
    pub fn resolve(&self, sigma1: f64) -> Result<Self> {
        self.validate()?;
        match *self {
            FilterSpec::Landweber { alpha, beta } => {
                let limit = 1.0 / (sigma1 * sigma1);
                let beta = beta.unwrap_or(0.5 * limit);
                if sigma1 > 0.0 && beta >= limit {
                    return Err(Error::InvalidParameter(format!("Landweber β = {beta} must stay below 1/σ₁² = {limit}")));
                }
                Ok(FilterSpec::Landweber { alpha, beta: Some(beta) })
            }
            other => Ok(other),
        }
    }

    fn iterations(alpha: f64) -> f64 {
        (1.0 / alpha).round()
    }
}

/// `φ(t; α)` for the given filter. An unresolved Landweber step counts as `β = 1`.
pub fn filter_value(spec: &FilterSpec, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("singular value {t} must be nonnegative")));
    }
    match *spec {
        FilterSpec::Tikhonov { alpha } => Ok(t * t / (t * t + alpha)),
        FilterSpec::SpectralCutoff { alpha } => Ok(if t * t >= alpha { 1.0 } else { 0.0 }),
        FilterSpec::Landweber { alpha, beta } => {
            let x = beta.unwrap_or(1.0) * t * t;
            if x > 1.0 {
                return Err(Error::LandweberUndefined(x));
            }
            // 1 - (1 - x)^m without cancellation for small x
            Ok(-(FilterSpec::iterations(alpha) * (-x).ln_1p()).exp_m1())
        }
    }
}

fn probe(z: Point, sys: &NoisySystem) -> DVector<Complex64> {
    let grid = sys.clean.grid();
    DVector::from_iterator(grid.len(), grid.angles().map(|t| Complex64::new(poisson_unchecked(z, t), 0.0)))
}

/// `Σ_j φ²(σ_j; α)/σ_j |(u_j, b)|²` for an arbitrary probe `b`.
pub fn indicator_for_probe(sys: &NoisySystem, spec: &FilterSpec, b: &DVector<Complex64>) -> Result<f64> {
    if b.len() != sys.noisy.nrows() {
        return Err(Error::DimensionMismatch(format!("probe of length {} for a {}-node system", b.len(), sys.noisy.nrows())));
    }
    let spec = spec.resolve(sys.largest_singular_value())?;
    let weights = filter_weights(sys, &spec)?;
    Ok(weighted_sum(&weights, &sys.coefficients(b)))
}

fn filter_weights(sys: &NoisySystem, spec: &FilterSpec) -> Result<Vec<f64>> {
    sys.singular_values()
        .iter()
        .map(|&s| {
            if s == 0.0 {
                return Ok(0.0);
            }
            let phi = filter_value(spec, s)?;
            Ok(phi * phi / s)
        })
        .collect()
}

fn weighted_sum(weights: &[f64], coefficients: &[f64]) -> f64 {
    weights.iter().zip(coefficients).map(|(w, c)| w * c).sum()
}

/// Range-test indicator `(f_z, A^δ f_z)` at the sampling point `z`, with the
/// probe `b_z = [∂_ν G(z, θ_k)]_k`.
pub fn indicator(sys: &NoisySystem, spec: &FilterSpec, z: Point) -> Result<f64> {
    z.ensure_interior()?;
    indicator_for_probe(sys, spec, &probe(z, sys))
}

/// `W = W_reg / max W_reg` with `W_reg = 1/indicator`. Points whose indicator
/// vanishes take the reciprocal of the smallest positive indicator instead and
/// are counted in the metadata.
pub fn w_field(sys: &NoisySystem, spec: &FilterSpec, grid: &SamplingGrid) -> Result<IndicatorField> {
    let resolved = spec.resolve(sys.largest_singular_value())?;
    let weights = filter_weights(sys, &resolved)?;
    let raw: Vec<f64> = grid.points().map(|z| weighted_sum(&weights, &sys.coefficients(&probe(z, sys)))).collect();

    let smallest = raw.iter().copied().filter(|&v| v > 0.0).fold(f64::INFINITY, f64::min);
    let fallback = if smallest.is_finite() { 1.0 / smallest } else { 1.0 };
    let mut patched = 0;
    let mut reg: Vec<f64> = raw
        .iter()
        .map(|&v| {
            if v > 0.0 {
                1.0 / v
            } else {
                patched += 1;
                fallback
            }
        })
        .collect();
    let max = reg.iter().copied().fold(0.0, f64::max);
    for v in &mut reg {
        *v /= max;
    }

    let mut meta = FieldMeta::new(Method::Factorization)
        .with_param("alpha", resolved.alpha())
        .with_param("delta", sys.delta)
        .with_param("seed", sys.seed as f64)
        .with_param("sigma_1", sys.largest_singular_value());
    if let FilterSpec::Landweber { beta: Some(beta), .. } = resolved {
        meta = meta.with_param("beta", beta);
    }
    meta.patched_points = patched;
    IndicatorField::new(grid.clone(), reg, meta)
}
