//! Boundary-integral forward solver for the Robin transmission problem.
//!
//! The potential satisfies `u(z) + ∫_{∂D} G(z, x) γ(x) u(x) ds(x) = u₀(z)` for
//! `z ∈ ∂D`, and the current gap on the outer circle is
//! `(Λ - Λ₀)f(z) = -∫_{∂D} γ(x) u(x) ∂_ν(z) G(x, z) ds(x)`.
//!
//! Each closed curve is sampled at `M` equally spaced parameter values. On a
//! curve's own block the logarithmic part of `G` is integrated with the
//! product weights for `ln(4 sin²((t - s)/2))`; the remainder of the kernel is
//! smooth and uses the trapezoid rule. Blocks coupling different components
//! are smooth and use the trapezoid rule throughout.

use alloc::format;
use alloc::vec::Vec;
use core::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector, Dyn, LU};
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{lifting_unchecked, BoundaryGrid, CurvePoint, FourierBasisSet, InclusionGeometry, Point, RobinCoefficient, SmallDiscs};
use crate::greens::{green_image, green_unchecked, poisson_unchecked};
use crate::linalg;
use crate::operator::{CurrentGapMatrix, Provenance};

/// Nodes on a star-shaped or circular inclusion boundary.
pub const DEFAULT_CURVE_NODES: usize = 128;
/// Nodes on each small-disc component.
pub const DEFAULT_DISC_NODES: usize = 32;
/// Systems with a larger 2-norm condition estimate are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Product-quadrature weights `R_d` for `∫₀^{2π} ln(4 sin²((t_i - s)/2)) φ(s) ds ≈ Σ_j R_{|i-j|} φ(s_j)`
/// on `m = 2p` equally spaced nodes.
pub fn log_quadrature_weights(m: usize) -> Vec<f64> {
    let p = m / 2;
    let pf = p as f64;
    (0..m)
        .map(|d| {
            let t = PI * d as f64 / pf;
            let series: f64 = (1..p).map(|k| (k as f64 * t).cos() / k as f64).sum();
            let alternating = if d % 2 == 0 { 1.0 } else { -1.0 };
            -TAU / pf * series - PI / (pf * pf) * alternating
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Component {
    start: usize,
    len: usize,
}

/// Nodes, weights and coefficient samples on every inclusion boundary.
#[derive(Debug, Clone)]
pub struct BoundaryNodes {
    points: Vec<Point>,
    speeds: Vec<f64>,
    params: Vec<f64>,
    gamma: Vec<f64>,
    components: Vec<Component>,
}

impl BoundaryNodes {
    /// `nodes` per closed curve (per component for small discs).
    pub fn new(geometry: &InclusionGeometry, gamma: &RobinCoefficient, nodes: usize) -> Result<Self> {
        if nodes < 4 || !nodes.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("node count {nodes} must be even and at least 4")));
        }
        let mut out = Self { points: Vec::new(), speeds: Vec::new(), params: Vec::new(), gamma: Vec::new(), components: Vec::new() };
        match geometry {
            InclusionGeometry::ConcentricDisc { .. } | InclusionGeometry::StarShaped(_) => {
                out.push_curve(nodes, gamma, |t| crate::geometry::boundary_curve(geometry, t).expect("single curve"));
            }
            InclusionGeometry::SmallDiscs(discs) => {
                for j in 0..discs.len() {
                    out.push_curve(nodes, gamma, |t| discs.curve(j, t));
                }
            }
        }
        Ok(out)
    }

    fn push_curve(&mut self, m: usize, gamma: &RobinCoefficient, curve: impl Fn(f64) -> CurvePoint) {
        let start = self.points.len();
        for i in 0..m {
            let t = TAU * i as f64 / m as f64;
            let c = curve(t);
            self.points.push(c.point);
            self.speeds.push(c.speed);
            self.params.push(t);
            self.gamma.push(gamma.eval(t));
        }
        self.components.push(Component { start, len: m });
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn gamma(&self) -> &[f64] {
        &self.gamma
    }

    /// Arclength quadrature weight `(2π/M)|x'(t)|` of node `i`.
    pub fn weight(&self, i: usize) -> f64 {
        let c = self.component_of(i);
        TAU / c.len as f64 * self.speeds[i]
    }

    fn component_of(&self, i: usize) -> &Component {
        self.components.iter().find(|c| i >= c.start && i < c.start + c.len).expect("node index in range")
    }

    /// Arclength average of `γ` over each component.
    pub fn gamma_averages(&self) -> Vec<f64> {
        self.components
            .iter()
            .map(|c| {
                let range = c.start..c.start + c.len;
                let length: f64 = range.clone().map(|i| self.speeds[i]).sum();
                range.map(|i| self.gamma[i] * self.speeds[i]).sum::<f64>() / length
            })
            .collect()
    }

    /// Samples of the harmonic lifting of `e^{inθ}` at the nodes.
    pub fn lifting(&self, n: i32) -> Vec<Complex64> {
        self.points.iter().map(|&x| lifting_unchecked(x, n)).collect()
    }

    /// `-Σ_j w_j γ_j ψ_j ∂_ν G(x_j, θ_k)` at every outer-boundary node.
    pub fn current_gap_from_trace(&self, trace: &[Complex64], grid: &BoundaryGrid) -> DVector<Complex64> {
        let density: Vec<Complex64> = (0..self.len()).map(|j| trace[j] * (self.weight(j) * self.gamma[j])).collect();
        DVector::from_iterator(
            grid.len(),
            grid.angles().map(|t| {
                -self
                    .points
                    .iter()
                    .zip(&density)
                    .fold(Complex64::new(0.0, 0.0), |acc, (&x, &q)| acc + q * poisson_unchecked(x, t))
            }),
        )
    }

    /// Single-layer quadrature matrix `𝒢_ij ≈ ∫ G(x_i, x) φ(x) ds` acting on nodal `φ`.
    fn single_layer(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut g = DMatrix::zeros(n, n);
        for ci in &self.components {
            let log_w = log_quadrature_weights(ci.len);
            for cj in &self.components {
                for i in ci.start..ci.start + ci.len {
                    for j in cj.start..cj.start + cj.len {
                        let w = TAU / cj.len as f64 * self.speeds[j];
                        g[(i, j)] = if ci.start != cj.start {
                            green_unchecked(self.points[i], self.points[j]) * w
                        } else {
                            let d = (i - ci.start).abs_diff(j - ci.start);
                            let smooth = if i == j {
                                -self.speeds[i].ln() / TAU + green_image(self.points[i], self.points[i])
                            } else {
                                let half = 0.5 * (self.params[i] - self.params[j]);
                                let ratio = self.points[i].distance(self.points[j]) / (2.0 * half.sin().abs());
                                -ratio.ln() / TAU + green_image(self.points[i], self.points[j])
                            };
                            -log_w[d] / (2.0 * TAU) * self.speeds[j] + smooth * w
                        };
                    }
                }
            }
        }
        g
    }
}

/// Factorized Nyström system `(I + 𝒢Γ)ψ = u₀` for one inclusion geometry.
pub struct BieDiscretization {
    nodes: BoundaryNodes,
    lu: LU<f64, Dyn, Dyn>,
    condition: f64,
}

impl BieDiscretization {
    pub fn new(geometry: &InclusionGeometry, gamma: &RobinCoefficient, nodes: usize) -> Result<Self> {
        let nodes = BoundaryNodes::new(geometry, gamma, nodes)?;
        let mut system = nodes.single_layer();
        for (j, mut col) in system.column_iter_mut().enumerate() {
            col *= nodes.gamma[j];
        }
        for i in 0..nodes.len() {
            system[(i, i)] += 1.0;
        }
        let sv = system.clone().singular_values();
        let (smax, smin) = sv.iter().fold((0.0f64, f64::INFINITY), |(hi, lo), &s| (hi.max(s), lo.min(s)));
        let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
        if !(condition <= MAX_CONDITION) {
            return Err(Error::SingularSystem { condition });
        }
        Ok(Self { nodes, lu: system.lu(), condition })
    }

    pub fn nodes(&self) -> &BoundaryNodes {
        &self.nodes
    }

    /// 2-norm condition number of the system matrix.
    pub fn condition(&self) -> f64 {
        self.condition
    }

    /// Solves for the boundary trace given arbitrary right-hand side samples.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        if rhs.len() != self.nodes.len() {
            return Err(Error::DimensionMismatch(format!("rhs has {} entries, expected {}", rhs.len(), self.nodes.len())));
        }
        let b = DMatrix::from_fn(rhs.len(), 2, |i, c| if c == 0 { rhs[i].re } else { rhs[i].im });
        let x = self.lu.solve(&b).ok_or(Error::SingularSystem { condition: self.condition })?;
        Ok((0..rhs.len()).map(|i| Complex64::new(x[(i, 0)], x[(i, 1)])).collect())
    }

    /// Trace `ψ = u|_{∂D}` for the voltage `e^{inθ}`.
    pub fn solve_trace(&self, n: i32) -> Result<Vec<Complex64>> {
        self.solve(&self.nodes.lifting(n))
    }

    /// `(Λ - Λ₀)e^{inθ}` at the outer boundary nodes.
    pub fn current_gap(&self, n: i32, grid: &BoundaryGrid) -> Result<DVector<Complex64>> {
        let trace = self.solve_trace(n)?;
        Ok(self.nodes.current_gap_from_trace(&trace, grid))
    }

    /// Response matrix over a Fourier basis (columns in basis order).
    pub fn assemble(&self, basis: &FourierBasisSet, grid: &BoundaryGrid) -> Result<CurrentGapMatrix> {
        let mut m = DMatrix::zeros(grid.len(), basis.len());
        for (col, &n) in basis.indices().iter().enumerate() {
            m.set_column(col, &self.current_gap(n, grid)?);
        }
        CurrentGapMatrix::responses(m, basis.clone(), *grid, Provenance::Bie)
    }
}

/// Trace of `u` on `∂D` for the voltage `e^{inθ}`.
pub fn solve_trace(geometry: &InclusionGeometry, gamma: &RobinCoefficient, n: i32, nodes: usize) -> Result<Vec<Complex64>> {
    BieDiscretization::new(geometry, gamma, nodes)?.solve_trace(n)
}

/// Full current gap `(Λ - Λ₀)e^{inθ}` sampled on the outer grid.
pub fn current_gap(
    geometry: &InclusionGeometry,
    gamma: &RobinCoefficient,
    n: i32,
    grid: &BoundaryGrid,
    nodes: usize,
) -> Result<DVector<Complex64>> {
    BieDiscretization::new(geometry, gamma, nodes)?.current_gap(n, grid)
}

pub fn assemble_bie_operator(
    geometry: &InclusionGeometry,
    gamma: &RobinCoefficient,
    basis: &FourierBasisSet,
    grid: &BoundaryGrid,
    nodes: usize,
) -> Result<CurrentGapMatrix> {
    BieDiscretization::new(geometry, gamma, nodes)?.assemble(basis, grid)
}

/// Born approximation: the data integral with `u` replaced by `u₀`.
pub fn born_current_gap(
    discs: &SmallDiscs,
    gamma: &RobinCoefficient,
    n: i32,
    grid: &BoundaryGrid,
    nodes_per_disc: usize,
) -> Result<DVector<Complex64>> {
    let nodes = BoundaryNodes::new(&InclusionGeometry::SmallDiscs(discs.clone()), gamma, nodes_per_disc)?;
    Ok(nodes.current_gap_from_trace(&nodes.lifting(n), grid))
}

pub fn assemble_born_operator(
    discs: &SmallDiscs,
    gamma: &RobinCoefficient,
    basis: &FourierBasisSet,
    grid: &BoundaryGrid,
    nodes_per_disc: usize,
) -> Result<CurrentGapMatrix> {
    let nodes = BoundaryNodes::new(&InclusionGeometry::SmallDiscs(discs.clone()), gamma, nodes_per_disc)?;
    let mut m = DMatrix::zeros(grid.len(), basis.len());
    for (col, &n) in basis.indices().iter().enumerate() {
        m.set_column(col, &nodes.current_gap_from_trace(&nodes.lifting(n), grid));
    }
    CurrentGapMatrix::responses(m, basis.clone(), *grid, Provenance::Born)
}

/// Leading-order point-source data
/// `-ε Σ_j |∂B_j| Avg(γ_j) u₀(x_j) ∂_ν G(x_j, ·)` in two dimensions.
pub fn asymptotic_current_gap(
    discs: &SmallDiscs,
    gamma_averages: &[f64],
    n: i32,
    grid: &BoundaryGrid,
) -> Result<DVector<Complex64>> {
    if gamma_averages.len() != discs.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} γ averages for {} components",
            gamma_averages.len(),
            discs.len()
        )));
    }
    let eps = discs.scale();
    Ok(DVector::from_iterator(
        grid.len(),
        grid.angles().map(|t| {
            discs.components().iter().zip(gamma_averages).fold(Complex64::new(0.0, 0.0), |acc, (c, &g)| {
                acc - lifting_unchecked(c.center, n) * (eps * c.shape_perimeter() * g * poisson_unchecked(c.center, t))
            })
        }),
    ))
}

/// Arclength averages of `γ` over each component, by trapezoid on `nodes` points.
pub fn component_gamma_averages(discs: &SmallDiscs, gamma: &RobinCoefficient, nodes: usize) -> Result<Vec<f64>> {
    Ok(BoundaryNodes::new(&InclusionGeometry::SmallDiscs(discs.clone()), gamma, nodes)?.gamma_averages())
}

pub fn assemble_asymptotic_operator(
    discs: &SmallDiscs,
    gamma: &RobinCoefficient,
    basis: &FourierBasisSet,
    grid: &BoundaryGrid,
) -> Result<CurrentGapMatrix> {
    let averages = component_gamma_averages(discs, gamma, DEFAULT_DISC_NODES)?;
    let mut m = DMatrix::zeros(grid.len(), basis.len());
    for (col, &n) in basis.indices().iter().enumerate() {
        m.set_column(col, &asymptotic_current_gap(discs, &averages, n, grid)?);
    }
    CurrentGapMatrix::responses(m, basis.clone(), *grid, Provenance::Asymptotic)
}

/// Operator norms comparing the three small-volume data models at one scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingRow {
    pub scale: f64,
    /// `‖full - born‖₂`
    pub full_minus_born: f64,
    /// `‖born‖₂`
    pub born: f64,
    /// `‖full - asymptotic‖₂`
    pub full_minus_asymptotic: f64,
}

/// Spectral norms of the response matrices over `basis` for each scale `ε`.
pub fn asymptotic_scaling_report(
    base: &SmallDiscs,
    gamma: &RobinCoefficient,
    scales: &[f64],
    basis: &FourierBasisSet,
    grid: &BoundaryGrid,
    nodes_per_disc: usize,
) -> Result<Vec<ScalingRow>> {
    scales
        .iter()
        .map(|&eps| {
            let discs = base.with_scale(eps)?;
            let geometry = InclusionGeometry::SmallDiscs(discs.clone());
            let full = assemble_bie_operator(&geometry, gamma, basis, grid, nodes_per_disc)?;
            let born = assemble_born_operator(&discs, gamma, basis, grid, nodes_per_disc)?;
            let asym = assemble_asymptotic_operator(&discs, gamma, basis, grid)?;
            Ok(ScalingRow {
                scale: eps,
                full_minus_born: linalg::spectral_norm(&(full.matrix() - born.matrix())),
                born: linalg::spectral_norm(born.matrix()),
                full_minus_asymptotic: linalg::spectral_norm(&(full.matrix() - asym.matrix())),
            })
        })
        .collect()
}
