//! Domain types shared by every solver: points in the unit disk, boundary and
//! sampling grids, inclusion geometries, the Robin coefficient and the Fourier
//! voltage basis.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::TAU;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};

/// Default number of equally spaced nodes on the outer boundary.
pub const DEFAULT_BOUNDARY_NODES: usize = 64;
/// Default MUSIC basis order (voltages `e^{inθ}`, `n = 0..=20`).
pub const DEFAULT_MUSIC_ORDER: usize = 20;
/// Default factorization basis order (voltages `e^{inθ}`, `|n| <= 30`).
pub const DEFAULT_FACTORIZATION_ORDER: usize = 30;
/// Default sampling-grid resolution per axis over `[-1, 1]`.
pub const DEFAULT_SAMPLES_PER_AXIS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(r: f64, theta: f64) -> Self {
        Self::new(r * theta.cos(), r * theta.sin())
    }

    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar angle in `(-π, π]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn distance(self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn rotated(self, angle: f64) -> Point {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn ensure_interior(self) -> Result<Self> {
        if self.x.is_finite() && self.y.is_finite() && self.norm_sq() < 1.0 {
            Ok(self)
        } else {
            Err(Error::OutsideDomain { x: self.x, y: self.y })
        }
    }

    pub fn as_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:.4}, {:.4})", self.x, self.y)
    }
}

/// Equally spaced nodes `θ_k = 2πk/K` on the unit circle with trapezoid weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryGrid {
    nodes: usize,
}

impl BoundaryGrid {
    pub fn new(nodes: usize) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::InvalidParameter("boundary grid needs at least one node".into()));
        }
        Ok(Self { nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    pub fn angle(&self, k: usize) -> f64 {
        TAU * k as f64 / self.nodes as f64
    }

    pub fn angles(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.nodes).map(|k| self.angle(k))
    }

    /// Trapezoid weight `2π/K`, identical at every node.
    pub fn weight(&self) -> f64 {
        TAU / self.nodes as f64
    }

    pub fn point(&self, k: usize) -> Point {
        Point::polar(1.0, self.angle(k))
    }
}

impl Default for BoundaryGrid {
    fn default() -> Self {
        Self { nodes: DEFAULT_BOUNDARY_NODES }
    }
}

/// Tensor grid of sampling points restricted to the interior of the unit disk.
///
/// The full rectangular lattice is kept so that level sets can be traced over
/// grid cells; only lattice points with `|z| < 1 - margin` are active.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingGrid {
    xs: Vec<f64>,
    ys: Vec<f64>,
    active: Vec<usize>,
    lookup: Vec<Option<usize>>,
}

impl SamplingGrid {
    /// `nx` by `ny` lattice with uniform spacing over the given ranges, keeping
    /// points with `|z| < 1 - margin`.
    pub fn linspace(x_range: (f64, f64), y_range: (f64, f64), nx: usize, ny: usize, margin: f64) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::InvalidParameter("sampling grid needs at least 2 points per axis".into()));
        }
        for (lo, hi) in [x_range, y_range] {
            if !(lo < hi) || lo < -1.0 || hi > 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "sampling range [{lo}, {hi}] must be increasing and inside [-1, 1]"
                )));
            }
        }
        if !(0.0..1.0).contains(&margin) {
            return Err(Error::InvalidParameter(format!("margin {margin} must lie in [0, 1)")));
        }
        let axis = |(lo, hi): (f64, f64), n: usize| -> Vec<f64> {
            (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
        };
        let xs = axis(x_range, nx);
        let ys = axis(y_range, ny);
        let radius_sq = (1.0 - margin) * (1.0 - margin);
        let mut active = Vec::new();
        let mut lookup = alloc::vec![None; nx * ny];
        for (j, &y) in ys.iter().enumerate() {
            for (i, &x) in xs.iter().enumerate() {
                let r2 = x * x + y * y;
                if r2 < radius_sq && r2 < 1.0 {
                    lookup[j * nx + i] = Some(active.len());
                    active.push(j * nx + i);
                }
            }
        }
        Ok(Self { xs, ys, active, lookup })
    }

    /// Lattice with spacing as close as possible to `step` (ranges are covered
    /// end to end), discarding points with `|z| >= 1 - step`.
    pub fn with_step(x_range: (f64, f64), y_range: (f64, f64), step: f64) -> Result<Self> {
        if !(step > 0.0) {
            return Err(Error::InvalidParameter(format!("grid step {step} must be positive")));
        }
        let count = |(lo, hi): (f64, f64)| ((hi - lo) / step).round() as usize + 1;
        let grid = Self::linspace(x_range, y_range, count(x_range).max(2), count(y_range).max(2), 0.0)?;
        let h = grid.step_x();
        Self::linspace(x_range, y_range, grid.xs.len(), grid.ys.len(), h)
    }

    pub fn nx(&self) -> usize {
        self.xs.len()
    }

    pub fn ny(&self) -> usize {
        self.ys.len()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn step_x(&self) -> f64 {
        self.xs[1] - self.xs[0]
    }

    pub fn step_y(&self) -> f64 {
        self.ys[1] - self.ys[0]
    }

    /// Number of active sampling points.
    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn point(&self, idx: usize) -> Point {
        let (i, j) = self.lattice_index(idx);
        Point::new(self.xs[i], self.ys[j])
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|idx| self.point(idx))
    }

    /// Lattice coordinates `(column, row)` of an active point.
    pub fn lattice_index(&self, idx: usize) -> (usize, usize) {
        let flat = self.active[idx];
        (flat % self.nx(), flat / self.nx())
    }

    /// Active index at lattice position `(column, row)`, if that point is inside.
    pub fn active_index(&self, i: usize, j: usize) -> Option<usize> {
        if i >= self.nx() || j >= self.ny() {
            return None;
        }
        self.lookup[j * self.nx() + i]
    }
}

impl Default for SamplingGrid {
    fn default() -> Self {
        let n = DEFAULT_SAMPLES_PER_AXIS;
        let h = 2.0 / (n - 1) as f64;
        Self::linspace((-1.0, 1.0), (-1.0, 1.0), n, n, h).expect("default grid is valid")
    }
}

/// Boundary point, arclength factor and unit outward normal of a parametrized curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub point: Point,
    pub speed: f64,
    pub normal: Point,
}

/// Radius of a star-shaped curve `ρ(θ)(cos θ, sin θ)` with its exact derivative.
pub trait RadialProfile: Send + Sync {
    fn radius(&self, theta: f64) -> f64;
    fn derivative(&self, theta: f64) -> f64;
}

/// Finite trigonometric radius `ρ(θ) = c₀ + Σ_k (a_k cos kθ + b_k sin kθ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigProfile {
    pub mean: f64,
    /// `(k, a_k, b_k)` triples.
    pub terms: Vec<(u32, f64, f64)>,
}

impl TrigProfile {
    pub fn circle(radius: f64) -> Self {
        Self { mean: radius, terms: Vec::new() }
    }

    /// `scale · (base + amplitude · cos(order·θ))`.
    pub fn cosine(scale: f64, base: f64, amplitude: f64, order: u32) -> Self {
        Self { mean: scale * base, terms: alloc::vec![(order, scale * amplitude, 0.0)] }
    }

    /// Acorn-shaped curve `0.25(1 + 0.15 cos 3θ)`.
    pub fn acorn() -> Self {
        Self::cosine(0.25, 1.0, 0.15, 3)
    }

    /// Five-pointed star `0.25(2 + 0.3 cos 5θ)`.
    pub fn star() -> Self {
        Self::cosine(0.25, 2.0, 0.3, 5)
    }

    /// Profile of the same curve rotated counterclockwise by `angle`, i.e. `ρ(θ - angle)`.
    pub fn rotated(&self, angle: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|&(k, a, b)| {
                let (s, c) = (k as f64 * angle).sin_cos();
                (k, a * c - b * s, a * s + b * c)
            })
            .collect();
        Self { mean: self.mean, terms }
    }
}

impl RadialProfile for TrigProfile {
    fn radius(&self, theta: f64) -> f64 {
        self.terms.iter().fold(self.mean, |acc, &(k, a, b)| {
            let (s, c) = (k as f64 * theta).sin_cos();
            acc + a * c + b * s
        })
    }

    fn derivative(&self, theta: f64) -> f64 {
        self.terms.iter().fold(0.0, |acc, &(k, a, b)| {
            let kf = k as f64;
            let (s, c) = (kf * theta).sin_cos();
            acc + kf * (b * c - a * s)
        })
    }
}

/// Profile given by a pair of closures `(ρ, ρ')`.
pub struct FnProfile<R, D> {
    radius: R,
    derivative: D,
}

impl<R, D> FnProfile<R, D>
where
    R: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    pub fn new(radius: R, derivative: D) -> Self {
        Self { radius, derivative }
    }
}

impl<R, D> RadialProfile for FnProfile<R, D>
where
    R: Fn(f64) -> f64 + Send + Sync,
    D: Fn(f64) -> f64 + Send + Sync,
{
    fn radius(&self, theta: f64) -> f64 {
        (self.radius)(theta)
    }

    fn derivative(&self, theta: f64) -> f64 {
        (self.derivative)(theta)
    }
}

/// Samples used to check `0 < ρ(θ) < 1` and to bound a callable coefficient.
const PROFILE_CHECK_SAMPLES: usize = 2048;

#[derive(Clone)]
pub struct StarShape {
    profile: Arc<dyn RadialProfile>,
}

impl StarShape {
    pub fn new(profile: impl RadialProfile + 'static) -> Result<Self> {
        Self::from_arc(Arc::new(profile))
    }

    pub fn from_arc(profile: Arc<dyn RadialProfile>) -> Result<Self> {
        for k in 0..PROFILE_CHECK_SAMPLES {
            let theta = TAU * k as f64 / PROFILE_CHECK_SAMPLES as f64;
            let r = profile.radius(theta);
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::InvalidGeometry(format!(
                    "star-shaped radius {r} at θ = {theta:.4} is outside (0, 1)"
                )));
            }
        }
        Ok(Self { profile })
    }

    pub fn profile(&self) -> &dyn RadialProfile {
        &*self.profile
    }

    pub fn curve(&self, theta: f64) -> CurvePoint {
        star_curve(self.profile.radius(theta), self.profile.derivative(theta), theta)
    }
}

impl fmt::Debug for StarShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StarShape").field("radius(0)", &self.profile.radius(0.0)).finish()
    }
}

fn star_curve(r: f64, dr: f64, theta: f64) -> CurvePoint {
    let (s, c) = theta.sin_cos();
    let speed = r.hypot(dr);
    CurvePoint {
        point: Point::new(r * c, r * s),
        speed,
        normal: Point::new((r * c + dr * s) / speed, (r * s - dr * c) / speed),
    }
}

/// One small component `x_j + εB_j` with `B_j` a disc of radius `shape_radius`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscComponent {
    pub center: Point,
    pub shape_radius: f64,
}

impl DiscComponent {
    pub fn new(center: Point, shape_radius: f64) -> Self {
        Self { center, shape_radius }
    }

    /// Perimeter `|∂B_j|` of the unscaled shape.
    pub fn shape_perimeter(&self) -> f64 {
        TAU * self.shape_radius
    }
}

/// Union of well-separated small discs `x_j + εB_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct SmallDiscs {
    components: Vec<DiscComponent>,
    scale: f64,
}

impl SmallDiscs {
    pub fn new(components: Vec<DiscComponent>, scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidGeometry(format!("scale ε = {scale} must be positive")));
        }
        for (j, c) in components.iter().enumerate() {
            if !(c.shape_radius > 0.0) {
                return Err(Error::InvalidGeometry(format!("component {j} has non-positive radius")));
            }
            if c.center.norm() + scale * c.shape_radius >= 1.0 {
                return Err(Error::InvalidGeometry(format!(
                    "component {j} at {} does not lie strictly inside the unit disk",
                    c.center
                )));
            }
        }
        for i in 0..components.len() {
            for j in i + 1..components.len() {
                let (a, b) = (components[i], components[j]);
                let gap = a.center.distance(b.center) - scale * (a.shape_radius + b.shape_radius);
                if gap <= 0.0 {
                    return Err(Error::InvalidGeometry(format!("components {i} and {j} overlap")));
                }
            }
        }
        Ok(Self { components, scale })
    }

    /// Unit-radius discs at the given centers.
    pub fn unit_discs(centers: &[Point], scale: f64) -> Result<Self> {
        Self::new(centers.iter().map(|&c| DiscComponent::new(c, 1.0)).collect(), scale)
    }

    pub fn components(&self) -> &[DiscComponent] {
        &self.components
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn with_scale(&self, scale: f64) -> Result<Self> {
        Self::new(self.components.clone(), scale)
    }

    /// Smallest pairwise center distance, `None` for fewer than two components.
    pub fn min_center_distance(&self) -> Option<f64> {
        let mut best: Option<f64> = None;
        for i in 0..self.components.len() {
            for j in i + 1..self.components.len() {
                let d = self.components[i].center.distance(self.components[j].center);
                best = Some(best.map_or(d, |b| b.min(d)));
            }
        }
        best
    }

    /// Boundary of component `j` at local angle `theta`.
    pub fn curve(&self, j: usize, theta: f64) -> CurvePoint {
        let c = self.components[j];
        let r = self.scale * c.shape_radius;
        let (s, co) = theta.sin_cos();
        CurvePoint {
            point: Point::new(c.center.x + r * co, c.center.y + r * s),
            speed: r,
            normal: Point::new(co, s),
        }
    }
}

/// The unknown region `D`.
#[derive(Debug, Clone)]
pub enum InclusionGeometry {
    ConcentricDisc { radius: f64 },
    StarShaped(StarShape),
    SmallDiscs(SmallDiscs),
}

impl InclusionGeometry {
    pub fn concentric_disc(radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius < 1.0) {
            return Err(Error::InvalidGeometry(format!("disc radius {radius} must lie in (0, 1)")));
        }
        Ok(Self::ConcentricDisc { radius })
    }

    pub fn star_shaped(profile: impl RadialProfile + 'static) -> Result<Self> {
        StarShape::new(profile).map(Self::StarShaped)
    }

    /// Whether `z` lies inside the region (used for scoring reconstructions).
    pub fn contains(&self, z: Point) -> bool {
        match self {
            Self::ConcentricDisc { radius } => z.norm() < *radius,
            Self::StarShaped(s) => z.norm() < s.profile().radius(z.angle()),
            Self::SmallDiscs(d) => d
                .components()
                .iter()
                .any(|c| z.distance(c.center) < d.scale() * c.shape_radius),
        }
    }
}

/// Boundary point, arclength factor `√(ρ² + ρ'²)` and outward normal of a
/// single closed curve.
pub fn boundary_curve(geometry: &InclusionGeometry, theta: f64) -> Result<CurvePoint> {
    match geometry {
        InclusionGeometry::ConcentricDisc { radius } => Ok(star_curve(*radius, 0.0, theta)),
        InclusionGeometry::StarShaped(s) => Ok(s.curve(theta)),
        InclusionGeometry::SmallDiscs(_) => Err(Error::InvalidGeometry(
            "small-disc unions have one boundary per component; use SmallDiscs::curve".into(),
        )),
    }
}

enum GammaKind {
    Constant(f64),
    ReciprocalExpCos,
    Tabulated(Vec<f64>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

/// Robin transmission coefficient `γ` as a function of the boundary parameter.
#[derive(Clone)]
pub struct RobinCoefficient {
    kind: Arc<GammaKind>,
    min: f64,
    max: f64,
}

impl RobinCoefficient {
    pub fn constant(value: f64) -> Result<Self> {
        Self::checked(GammaKind::Constant(value), value, value)
    }

    /// `γ(θ) = 1 / (4 + exp(cos θ))`.
    pub fn reciprocal_exp_cos() -> Self {
        let e = core::f64::consts::E;
        Self { kind: Arc::new(GammaKind::ReciprocalExpCos), min: 1.0 / (4.0 + e), max: 1.0 / (4.0 + 1.0 / e) }
    }

    /// Values at equally spaced angles `2πk/L`, linearly interpolated periodically.
    pub fn tabulated(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("tabulated γ needs at least one value".into()));
        }
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Self::checked(GammaKind::Tabulated(values), min, max)
    }

    /// Arbitrary callable; bounds are estimated by dense sampling.
    pub fn from_fn(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        let (mut min, mut max) = (f64::INFINITY, f64::NEG_INFINITY);
        for k in 0..PROFILE_CHECK_SAMPLES {
            let v = f(TAU * k as f64 / PROFILE_CHECK_SAMPLES as f64);
            min = min.min(v);
            max = max.max(v);
        }
        Self::checked(GammaKind::Custom(Arc::new(f)), min, max)
    }

    fn checked(kind: GammaKind, min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) || min < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "transmission coefficient must be finite and nonnegative, got range [{min}, {max}]"
            )));
        }
        Ok(Self { kind: Arc::new(kind), min, max })
    }

    pub fn eval(&self, theta: f64) -> f64 {
        match &*self.kind {
            GammaKind::Constant(v) => *v,
            GammaKind::ReciprocalExpCos => 1.0 / (4.0 + theta.cos().exp()),
            GammaKind::Tabulated(values) => {
                let len = values.len();
                let pos = theta.rem_euclid(TAU) / TAU * len as f64;
                let i = (pos.floor() as usize).min(len - 1);
                let frac = pos - i as f64;
                values[i] * (1.0 - frac) + values[(i + 1) % len] * frac
            }
            GammaKind::Custom(f) => f(theta),
        }
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn as_constant(&self) -> Option<f64> {
        match &*self.kind {
            GammaKind::Constant(v) => Some(*v),
            _ => None,
        }
    }

    /// Enforces `0 < γ_min`, required for well-posedness of the inverse problem.
    pub fn ensure_positive(&self) -> Result<()> {
        if self.min > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("γ_min = {} must be strictly positive", self.min)))
        }
    }
}

impl fmt::Debug for RobinCoefficient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &*self.kind {
            GammaKind::Constant(_) => "constant",
            GammaKind::ReciprocalExpCos => "reciprocal_exp_cos",
            GammaKind::Tabulated(_) => "tabulated",
            GammaKind::Custom(_) => "custom",
        };
        f.debug_struct("RobinCoefficient")
            .field("kind", &kind)
            .field("min", &self.min)
            .field("max", &self.max)
            .finish()
    }
}

/// Index set of Fourier voltages `f_n(θ) = e^{inθ}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourierBasisSet {
    indices: Vec<i32>,
}

impl FourierBasisSet {
    /// `n = 0, 1, …, order`.
    pub fn music(order: usize) -> Self {
        Self { indices: (0..=order as i32).collect() }
    }

    /// `n = -order, …, order`.
    pub fn symmetric(order: usize) -> Self {
        let o = order as i32;
        Self { indices: (-o..=o).collect() }
    }

    pub fn from_indices(indices: Vec<i32>) -> Result<Self> {
        let mut sorted = indices.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("Fourier basis indices must be distinct".into()));
        }
        Ok(Self { indices })
    }

    pub fn indices(&self) -> &[i32] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Highest index when the set is exactly `{0, …, N}`.
    pub fn music_order(&self) -> Option<usize> {
        let is_music = self.indices.iter().enumerate().all(|(i, &n)| n == i as i32);
        (is_music && !self.indices.is_empty()).then(|| self.indices.len() - 1)
    }

    /// Largest `|n|` in the set.
    pub fn max_abs(&self) -> u32 {
        self.indices.iter().map(|n| n.unsigned_abs()).max().unwrap_or(0)
    }

    /// Samples of `e^{inθ}` on a boundary grid.
    pub fn samples(n: i32, grid: &BoundaryGrid) -> Vec<Complex64> {
        grid.angles().map(|t| Complex64::from_polar(1.0, n as f64 * t)).collect()
    }
}

/// Harmonic extension of `e^{inθ}` into the unit disk: `|x|^{|n|} e^{inθ_x}`.
pub fn harmonic_lifting(x: Point, n: i32) -> Result<Complex64> {
    x.ensure_interior()?;
    Ok(lifting_unchecked(x, n))
}

pub(crate) fn lifting_unchecked(x: Point, n: i32) -> Complex64 {
    let z = x.as_complex();
    if n >= 0 {
        z.powu(n as u32)
    } else {
        z.conj().powu(n.unsigned_abs())
    }
}

/// Normalizes an angle into `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use core::f64::consts::PI;

    #[test]
    fn lifting_trivial_values() {
        assert_eq!(harmonic_lifting(Point::ORIGIN, 0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(harmonic_lifting(Point::ORIGIN, 3).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(harmonic_lifting(Point::ORIGIN, -2).unwrap(), Complex64::new(0.0, 0.0));
        let v = harmonic_lifting(Point::new(0.5, 0.0), 2).unwrap();
        assert_relative_eq!(v.re, 0.25, epsilon = 1e-15);
        assert_relative_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn lifting_negative_index_uses_modulus_power() {
        let x = Point::polar(0.6, 0.7);
        let v = harmonic_lifting(x, -3).unwrap();
        let expected = Complex64::from_polar(0.6f64.powi(3), -2.1);
        assert_relative_eq!(v.re, expected.re, epsilon = 1e-14);
        assert_relative_eq!(v.im, expected.im, epsilon = 1e-14);
    }

    #[test]
    fn lifting_rejects_boundary_points() {
        assert!(matches!(harmonic_lifting(Point::new(1.0, 0.0), 1), Err(Error::OutsideDomain { .. })));
        assert!(harmonic_lifting(Point::new(0.8, 0.8), 0).is_err());
    }

    #[test]
    fn disc_and_star_curves() {
        let disc = InclusionGeometry::concentric_disc(0.5).unwrap();
        let c = boundary_curve(&disc, 0.0).unwrap();
        assert_eq!(c.point, Point::new(0.5, 0.0));
        assert_relative_eq!(c.speed, 0.5);
        assert_relative_eq!(c.normal.x, 1.0);
        assert_relative_eq!(c.normal.y, 0.0);

        let acorn = InclusionGeometry::star_shaped(TrigProfile::acorn()).unwrap();
        let c = boundary_curve(&acorn, 0.0).unwrap();
        assert_relative_eq!(c.point.x, 0.2875, epsilon = 1e-15);
        assert_relative_eq!(c.point.y, 0.0);
        assert_relative_eq!(c.speed, 0.2875, epsilon = 1e-15);

        let round = InclusionGeometry::star_shaped(TrigProfile::circle(0.5)).unwrap();
        for k in 0..32 {
            let t = TAU * k as f64 / 32.0 + 0.1;
            let a = boundary_curve(&disc, t).unwrap();
            let b = boundary_curve(&round, t).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn star_normal_is_unit_and_orthogonal_to_tangent() {
        let star = StarShape::new(TrigProfile::star()).unwrap();
        let p = star.profile();
        for k in 0..50 {
            let t = 0.13 * k as f64;
            let c = star.curve(t);
            let (s, co) = t.sin_cos();
            let tangent = Point::new(
                p.derivative(t) * co - p.radius(t) * s,
                p.derivative(t) * s + p.radius(t) * co,
            );
            assert_relative_eq!(c.normal.norm(), 1.0, epsilon = 1e-14);
            assert_relative_eq!(c.normal.dot(tangent), 0.0, epsilon = 1e-14);
            assert_relative_eq!(tangent.norm(), c.speed, epsilon = 1e-14);
            // outward: normal points away from origin for star-shaped curves
            assert!(c.normal.dot(c.point) > 0.0);
        }
    }

    #[test]
    fn trig_profile_derivative_matches_finite_difference() {
        let p = TrigProfile { mean: 0.4, terms: alloc::vec![(2, 0.05, -0.03), (5, 0.01, 0.02)] };
        let h = 1e-6;
        for k in 0..20 {
            let t = 0.31 * k as f64;
            let fd = (p.radius(t + h) - p.radius(t - h)) / (2.0 * h);
            assert_relative_eq!(p.derivative(t), fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn rotated_profile_shifts_argument() {
        let p = TrigProfile::acorn();
        let tau = 0.37;
        let q = p.rotated(tau);
        for k in 0..20 {
            let t = 0.29 * k as f64;
            assert_relative_eq!(q.radius(t), p.radius(t - tau), epsilon = 1e-14);
        }
    }

    #[test]
    fn concentric_arclength_by_trapezoid() {
        let disc = InclusionGeometry::concentric_disc(0.5).unwrap();
        let grid = BoundaryGrid::default();
        let len: f64 = grid.angles().map(|t| boundary_curve(&disc, t).unwrap().speed * grid.weight()).sum();
        assert_relative_eq!(len, TAU * 0.5, epsilon = 1e-14);
        let w: f64 = (0..grid.len()).map(|_| grid.weight()).sum();
        assert_relative_eq!(w, TAU, epsilon = 1e-13);
    }

    #[test]
    fn invalid_geometries_rejected() {
        assert!(InclusionGeometry::concentric_disc(1.0).is_err());
        assert!(InclusionGeometry::concentric_disc(0.0).is_err());
        assert!(InclusionGeometry::star_shaped(TrigProfile::cosine(0.6, 1.0, 0.9, 2)).is_err());
        // overlapping
        assert!(SmallDiscs::unit_discs(&[Point::new(0.0, 0.0), Point::new(0.015, 0.0)], 0.01).is_err());
        // touching the outer boundary
        assert!(SmallDiscs::unit_discs(&[Point::new(0.995, 0.0)], 0.01).is_err());
        let ok = SmallDiscs::unit_discs(&[Point::new(-0.25, -0.25), Point::new(0.25, 0.25)], 0.01).unwrap();
        assert_relative_eq!(ok.min_center_distance().unwrap(), 0.5 * 2f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn robin_coefficient_bounds() {
        let g = RobinCoefficient::reciprocal_exp_cos();
        for k in 0..100 {
            let v = g.eval(0.0628 * k as f64);
            assert!(v >= g.min() - 1e-15 && v <= g.max() + 1e-15);
        }
        assert_relative_eq!(g.eval(0.0), 1.0 / (4.0 + core::f64::consts::E));
        assert!(RobinCoefficient::constant(-1.0).is_err());
        assert!(RobinCoefficient::constant(0.0).unwrap().ensure_positive().is_err());
        let t = RobinCoefficient::tabulated(alloc::vec![1.0, 3.0]).unwrap();
        assert_relative_eq!(t.eval(PI / 2.0), 2.0);
        assert_relative_eq!(t.eval(3.0 * PI / 2.0), 2.0);
        assert_eq!((t.min(), t.max()), (1.0, 3.0));
    }

    #[test]
    fn basis_sets() {
        let m = FourierBasisSet::music(20);
        assert_eq!(m.len(), 21);
        assert_eq!(m.music_order(), Some(20));
        let s = FourierBasisSet::symmetric(30);
        assert_eq!(s.len(), 61);
        assert_eq!(s.music_order(), None);
        assert_eq!(s.max_abs(), 30);
        assert!(FourierBasisSet::from_indices(alloc::vec![1, 2, 1]).is_err());
    }

    #[test]
    fn default_sampling_grid() {
        let g = SamplingGrid::default();
        assert_eq!((g.nx(), g.ny()), (100, 100));
        let h = g.step_x();
        assert_relative_eq!(h, 0.0202, epsilon = 1e-3);
        assert!(g.points().all(|z| z.norm() < 1.0 - h));
        // grid values are odd multiples of 1/99
        assert_relative_eq!(g.xs()[61], 0.2323, epsilon = 1e-4);
        let same = SamplingGrid::with_step((-1.0, 1.0), (-1.0, 1.0), 0.0202).unwrap();
        assert_eq!(same, g);
        let (i, j) = g.lattice_index(17);
        assert_eq!(g.active_index(i, j), Some(17));
    }
}
