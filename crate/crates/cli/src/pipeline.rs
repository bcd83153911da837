//! Forward data, imaging and the run report for one scenario.

use std::time::Instant;

use serde::Serialize;

use robin_eit_core::bie::{self, BieDiscretization};
use robin_eit_core::contour::{level_set, Contour};
use robin_eit_core::factorization::{apply_noise, w_field, NoisySystem};
use robin_eit_core::field::{extract_peaks, IndicatorField, Peak};
use robin_eit_core::music::{assemble_f, w_music, ResponseMatrix};
use robin_eit_core::noise::hadamard_noise;
use robin_eit_core::series::{self, SeriesCoefficients};
use robin_eit_core::{BoundaryGrid, CurrentGapMatrix, Error, FourierBasisSet, Point};

use crate::config::{ForwardPath, GeometrySpec, MethodKind, Resolved, ScenarioConfig, Source};

/// Solver failure with whatever conditioning information was available.
#[derive(Debug, thiserror::Error)]
#[error("{error}")]
pub struct SolverFailure {
    pub error: Error,
    pub condition: Option<f64>,
}

impl From<Error> for SolverFailure {
    fn from(error: Error) -> Self {
        let condition = match error {
            Error::SingularSystem { condition } => Some(condition),
            _ => None,
        };
        Self { error, condition }
    }
}

type Result<T> = std::result::Result<T, SolverFailure>;

/// Clean forward data plus the condition number of the integral system, if one was solved.
pub struct ForwardData {
    pub data: CurrentGapMatrix,
    pub condition: Option<f64>,
}

pub fn forward(config: &ScenarioConfig, r: &Resolved) -> Result<ForwardData> {
    let grid = BoundaryGrid::new(r.boundary_nodes)?;
    let gamma = config.build_gamma()?;
    let basis = match config.method.kind {
        MethodKind::Music => FourierBasisSet::music(r.order),
        MethodKind::Fm => FourierBasisSet::symmetric(r.order),
    };
    match config.forward.path {
        ForwardPath::Series => {
            let radius = match config.geometry {
                GeometrySpec::ConcentricDisc { radius } => radius,
                _ => return Err(Error::InvalidGeometry("series data needs a concentric disc".into()).into()),
            };
            let g = gamma.as_constant().ok_or_else(|| Error::InvalidParameter("series data needs a constant γ".into()))?;
            let coeffs = SeriesCoefficients::new(radius, g, r.order)?;
            Ok(ForwardData { data: series::assemble_series_operator(&grid, &coeffs)?, condition: None })
        }
        ForwardPath::Bie => {
            let disc = BieDiscretization::new(&config.build_geometry()?, &gamma, r.curve_nodes)?;
            Ok(ForwardData { data: disc.assemble(&basis, &grid)?, condition: Some(disc.condition()) })
        }
        ForwardPath::Born => {
            let discs = discs(config)?;
            Ok(ForwardData { data: bie::assemble_born_operator(&discs, &gamma, &basis, &grid, r.curve_nodes)?, condition: None })
        }
        ForwardPath::Asymptotic => {
            let discs = discs(config)?;
            Ok(ForwardData { data: bie::assemble_asymptotic_operator(&discs, &gamma, &basis, &grid)?, condition: None })
        }
    }
}

fn discs(config: &ScenarioConfig) -> Result<robin_eit_core::SmallDiscs> {
    config
        .build_discs()?
        .ok_or_else(|| Error::InvalidGeometry("this forward path needs small discs".into()).into())
}

/// Imaging data after noise: the MUSIC matrix or the factorization system.
pub enum Inversion {
    Music(ResponseMatrix),
    Factorization(NoisySystem),
}

impl Inversion {
    pub fn singular_values(&self) -> &[f64] {
        match self {
            Inversion::Music(f) => f.singular_values(),
            Inversion::Factorization(s) => s.singular_values(),
        }
    }
}

pub fn prepare(config: &ScenarioConfig, r: &Resolved, data: &CurrentGapMatrix) -> Result<Inversion> {
    let delta = config.noise.delta;
    match config.method.kind {
        MethodKind::Music => {
            let noisy = data.with_matrix(hadamard_noise(data.matrix(), delta, r.seed)?)?;
            Ok(Inversion::Music(assemble_f(&noisy, r.rank_threshold)?))
        }
        MethodKind::Fm => Ok(Inversion::Factorization(apply_noise(data, delta, r.seed)?)),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeakReport {
    pub x: f64,
    pub y: f64,
    pub value: f64,
}

impl From<&Peak> for PeakReport {
    fn from(p: &Peak) -> Self {
        Self { x: p.point.x, y: p.point.y, value: p.value }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ContourReport {
    pub level: f64,
    pub segments: usize,
    pub centroid: [f64; 2],
    pub mean_radius: f64,
    pub radial_std: f64,
}

impl ContourReport {
    pub fn new(c: &Contour) -> Self {
        let n = (2 * c.len()).max(1) as f64;
        let (sx, sy) = c.points().fold((0.0, 0.0), |(x, y), p| (x + p.x, y + p.y));
        let center = Point::new(sx / n, sy / n);
        Self {
            level: c.level,
            segments: c.len(),
            centroid: [center.x, center.y],
            mean_radius: c.mean_radius(center),
            radial_std: c.radial_std(center),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ProvenanceEntry {
    pub key: String,
    pub value: f64,
    pub source: Source,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timings {
    pub forward_s: f64,
    pub inversion_s: f64,
    pub imaging_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumSummary {
    pub count: usize,
    pub largest: f64,
    pub smallest: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub scenario: String,
    pub method: MethodKind,
    pub forward: ForwardPath,
    pub seed: u64,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rank: Option<usize>,
    pub patched_points: usize,
    pub spectrum: SpectrumSummary,
    pub timings: Timings,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub peaks: Vec<PeakReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub contour: Option<ContourReport>,
    pub provenance: Vec<ProvenanceEntry>,
    pub config: ScenarioConfig,
}

pub struct RunOutput {
    pub field: IndicatorField,
    pub spectrum: Vec<f64>,
    pub peaks: Vec<Peak>,
    pub contour: Option<Contour>,
    pub report: RunReport,
}

/// Runs forward simulation, noise and imaging. `seed` overrides the config.
pub fn run(config: &ScenarioConfig, seed: Option<u64>) -> Result<RunOutput> {
    let mut r = config.resolve();
    if let Some(s) = seed {
        r.seed = s;
    }
    let mut provenance: Vec<ProvenanceEntry> =
        r.provenance.iter().map(|(k, v, s)| ProvenanceEntry { key: k.clone(), value: *v, source: *s }).collect();
    provenance.push(ProvenanceEntry {
        key: "noise.seed".into(),
        value: r.seed as f64,
        source: if seed.is_some() { Source::CommandLine } else { Source::Config },
    });

    let t0 = Instant::now();
    let fwd = forward(config, &r)?;
    let t1 = Instant::now();
    let inversion = prepare(config, &r, &fwd.data)?;
    let t2 = Instant::now();
    let grid = config.build_grid()?;
    let (field, rank) = match &inversion {
        Inversion::Music(f) => (w_music(f, &grid)?, Some(f.rank())),
        Inversion::Factorization(sys) => (w_field(sys, &r.filter, &grid)?, None),
    };
    let (peaks, contour) = match config.method.kind {
        MethodKind::Music => (extract_peaks(&field, config.method.peaks), None),
        MethodKind::Fm => (Vec::new(), Some(level_set(&field, r.level)?)),
    };
    let t3 = Instant::now();

    let spectrum = inversion.singular_values().to_vec();
    let report = RunReport {
        scenario: config.scenario.name.clone(),
        method: config.method.kind,
        forward: config.forward.path,
        seed: r.seed,
        delta: config.noise.delta,
        condition: fwd.condition,
        rank,
        patched_points: field.meta().patched_points,
        spectrum: SpectrumSummary {
            count: spectrum.len(),
            largest: spectrum.first().copied().unwrap_or(0.0),
            smallest: spectrum.last().copied().unwrap_or(0.0),
        },
        timings: Timings {
            forward_s: (t1 - t0).as_secs_f64(),
            inversion_s: (t2 - t1).as_secs_f64(),
            imaging_s: (t3 - t2).as_secs_f64(),
        },
        peaks: peaks.iter().map(PeakReport::from).collect(),
        contour: contour.as_ref().map(ContourReport::new),
        provenance,
        config: config.clone(),
    };
    Ok(RunOutput { field, spectrum, peaks, contour, report })
}

/// Singular values of the imaging data without evaluating a field.
pub fn spectrum(config: &ScenarioConfig, seed: Option<u64>) -> Result<Vec<f64>> {
    let mut r = config.resolve();
    if let Some(s) = seed {
        r.seed = s;
    }
    let fwd = forward(config, &r)?;
    Ok(prepare(config, &r, &fwd.data)?.singular_values().to_vec())
}

pub fn scaling(config: &ScenarioConfig) -> Result<Vec<bie::ScalingRow>> {
    let r = config.resolve();
    let spec = config
        .scaling
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("scenario has no [scaling] section".into()))?;
    let discs = discs(config)?;
    let basis = match config.method.kind {
        MethodKind::Music => FourierBasisSet::music(r.order),
        MethodKind::Fm => FourierBasisSet::symmetric(r.order),
    };
    Ok(bie::asymptotic_scaling_report(
        &discs,
        &config.build_gamma()?,
        &spec.scales,
        &basis,
        &BoundaryGrid::new(r.boundary_nodes)?,
        r.curve_nodes,
    )?)
}

pub fn convergence(config: &ScenarioConfig) -> Result<Vec<series::TruncationRow>> {
    let spec = config
        .convergence
        .as_ref()
        .ok_or_else(|| Error::InvalidParameter("scenario has no [convergence] section".into()))?;
    let radius = match config.geometry {
        GeometrySpec::ConcentricDisc { radius } => radius,
        _ => return Err(Error::InvalidGeometry("convergence needs a concentric disc".into()).into()),
    };
    let g = config
        .build_gamma()?
        .as_constant()
        .ok_or_else(|| Error::InvalidParameter("convergence needs a constant γ".into()))?;
    Ok(series::truncation_error_report(radius, g, &spec.orders, spec.reference)?)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let num: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}
