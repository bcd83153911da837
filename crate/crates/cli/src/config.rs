//! Scenario files: TOML schema, defaults and cross-field validation.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use robin_eit_core::factorization::{FilterSpec, DEFAULT_ALPHA_CIRCULAR, DEFAULT_ALPHA_GENERAL};
use robin_eit_core::geometry::{
    DEFAULT_BOUNDARY_NODES, DEFAULT_FACTORIZATION_ORDER, DEFAULT_MUSIC_ORDER, DEFAULT_SAMPLES_PER_AXIS,
};
use robin_eit_core::music::DEFAULT_RANK_THRESHOLD;
use robin_eit_core::series::DEFAULT_REFERENCE_ORDER;
use robin_eit_core::{
    bie, DiscComponent, InclusionGeometry, Point, RobinCoefficient, SamplingGrid, SmallDiscs, TrigProfile,
};

/// One problem found in a scenario file, with the line it refers to when known.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: Option<usize>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "line {l}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub scenario: ScenarioInfo,
    pub geometry: GeometrySpec,
    pub gamma: GammaSpec,
    pub forward: ForwardSpec,
    #[serde(default)]
    pub noise: NoiseSpec,
    pub method: MethodSpec,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scaling: Option<ScalingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub convergence: Option<ConvergenceSpec>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioInfo {
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeometrySpec {
    ConcentricDisc {
        radius: f64,
    },
    /// Star-shaped region from a named shape or explicit harmonics
    /// `ρ(θ) = mean + Σ (a cos kθ + b sin kθ)` given as `[k, a, b]`.
    Star {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shape: Option<NamedShape>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mean: Option<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        harmonics: Vec<(u32, f64, f64)>,
    },
    SmallDiscs {
        centers: Vec<[f64; 2]>,
        scale: f64,
        /// Radii of the reference shapes `B_j` (default 1).
        #[serde(default, skip_serializing_if = "Option::is_none")]
        radii: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedShape {
    Acorn,
    Star,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GammaSpec {
    Constant { value: f64 },
    /// `1 / (4 + exp(cos θ))`
    PaperGamma,
    Tabulated { values: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ForwardPath {
    Series,
    Bie,
    Born,
    Asymptotic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ForwardSpec {
    pub path: ForwardPath,
    /// Highest voltage index `N` (series: truncation order).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub order: Option<usize>,
    /// Outer boundary nodes `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_nodes: Option<usize>,
    /// Nodes per inclusion curve `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_nodes: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseSpec {
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Music,
    Fm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    Tikhonov,
    Landweber,
    SpectralCutoff,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodSpec {
    pub kind: MethodKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_threshold: Option<f64>,
    /// Number of peaks to report; all significant maxima when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peaks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    /// Level of the reported contour `{W = level}`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSpec {
    pub samples: usize,
    pub x: [f64; 2],
    pub y: [f64; 2],
    /// Points with `|z| ≥ 1 - margin` are dropped (default: one grid step).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub margin: Option<f64>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { samples: DEFAULT_SAMPLES_PER_AXIS, x: [-1.0, 1.0], y: [-1.0, 1.0], margin: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub field: String,
    pub metadata: String,
    pub spectrum: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub heatmap: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contour: Option<String>,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            field: "field.csv".into(),
            metadata: "metadata.toml".into(),
            spectrum: "spectrum.csv".into(),
            heatmap: None,
            contour: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScalingSpec {
    pub scales: Vec<f64>,
    #[serde(default = "default_scaling_output")]
    pub output: String,
}

fn default_scaling_output() -> String {
    "scaling.csv".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceSpec {
    pub orders: Vec<usize>,
    #[serde(default = "default_reference")]
    pub reference: usize,
    #[serde(default = "default_convergence_output")]
    pub output: String,
}

fn default_reference() -> usize {
    DEFAULT_REFERENCE_ORDER
}

fn default_convergence_output() -> String {
    "convergence.csv".into()
}

/// Where a resolved numeric setting came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Config,
    Default,
    CommandLine,
}

/// Numeric settings after defaults are filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct Resolved {
    pub order: usize,
    pub boundary_nodes: usize,
    pub curve_nodes: usize,
    pub rank_threshold: f64,
    pub filter: FilterSpec,
    pub level: f64,
    pub seed: u64,
    /// `(key, value, source)` for every numeric default the run depends on.
    pub provenance: Vec<(String, f64, Source)>,
}

pub const DEFAULT_LEVEL: f64 = 0.1;

impl ScenarioConfig {
    pub fn parse(source: &str) -> Result<Self, Vec<Diagnostic>> {
        toml::from_str(source).map_err(|e| {
            let line = e.span().map(|s| line_of_offset(source, s.start));
            vec![Diagnostic { line, message: e.message().trim().to_string() }]
        })
    }

    /// Parses and validates, reporting every problem found.
    pub fn load(path: &Path) -> Result<(Self, String), Vec<Diagnostic>> {
        let source = std::fs::read_to_string(path)
            .map_err(|e| vec![Diagnostic { line: None, message: format!("cannot read {}: {e}", path.display()) }])?;
        let config = Self::parse(&source)?;
        let problems = config.validate(&source);
        if problems.is_empty() {
            Ok((config, source))
        } else {
            Err(problems)
        }
    }

    pub fn is_music(&self) -> bool {
        self.method.kind == MethodKind::Music
    }

    pub fn resolve(&self) -> Resolved {
        let mut prov = Vec::new();
        let mut pick = |key: &str, given: Option<f64>, default: f64| -> f64 {
            let (v, s) = match given {
                Some(v) => (v, Source::Config),
                None => (default, Source::Default),
            };
            prov.push((key.to_string(), v, s));
            v
        };
        let default_order = match (self.method.kind, self.forward.path) {
            (MethodKind::Music, _) => DEFAULT_MUSIC_ORDER,
            (MethodKind::Fm, ForwardPath::Series) => 10,
            (MethodKind::Fm, _) => DEFAULT_FACTORIZATION_ORDER,
        };
        let order = pick("forward.order", self.forward.order.map(|v| v as f64), default_order as f64) as usize;
        let boundary_nodes =
            pick("forward.boundary_nodes", self.forward.boundary_nodes.map(|v| v as f64), DEFAULT_BOUNDARY_NODES as f64)
                as usize;
        let default_curve = match self.geometry {
            GeometrySpec::SmallDiscs { .. } => bie::DEFAULT_DISC_NODES,
            _ => bie::DEFAULT_CURVE_NODES,
        };
        let curve_nodes = pick("forward.curve_nodes", self.forward.curve_nodes.map(|v| v as f64), default_curve as f64) as usize;
        let rank_threshold = pick("method.rank_threshold", self.method.rank_threshold, DEFAULT_RANK_THRESHOLD);
        let default_alpha = match self.geometry {
            GeometrySpec::ConcentricDisc { .. } => DEFAULT_ALPHA_CIRCULAR,
            _ => DEFAULT_ALPHA_GENERAL,
        };
        let alpha = pick("method.alpha", self.method.alpha, default_alpha);
        let level = pick("method.level", self.method.level, DEFAULT_LEVEL);
        let filter = match self.method.filter.unwrap_or(FilterKind::Tikhonov) {
            FilterKind::Tikhonov => FilterSpec::Tikhonov { alpha },
            FilterKind::SpectralCutoff => FilterSpec::SpectralCutoff { alpha },
            FilterKind::Landweber => FilterSpec::Landweber { alpha, beta: self.method.beta },
        };
        prov.push(("noise.delta".into(), self.noise.delta, Source::Config));
        Resolved { order, boundary_nodes, curve_nodes, rank_threshold, filter, level, seed: self.noise.seed, provenance: prov }
    }

    pub fn build_geometry(&self) -> robin_eit_core::Result<InclusionGeometry> {
        match &self.geometry {
            GeometrySpec::ConcentricDisc { radius } => InclusionGeometry::concentric_disc(*radius),
            GeometrySpec::Star { shape, mean, harmonics } => {
                let profile = match shape {
                    Some(NamedShape::Acorn) => TrigProfile::acorn(),
                    Some(NamedShape::Star) => TrigProfile::star(),
                    None => TrigProfile { mean: mean.unwrap_or(0.0), terms: harmonics.clone() },
                };
                InclusionGeometry::star_shaped(profile)
            }
            GeometrySpec::SmallDiscs { .. } => Ok(InclusionGeometry::SmallDiscs(self.build_discs()?.expect("small discs"))),
        }
    }

    pub fn build_discs(&self) -> robin_eit_core::Result<Option<SmallDiscs>> {
        match &self.geometry {
            GeometrySpec::SmallDiscs { centers, scale, radii } => {
                let components = centers
                    .iter()
                    .enumerate()
                    .map(|(j, c)| {
                        DiscComponent::new(Point::new(c[0], c[1]), radii.as_ref().and_then(|r| r.get(j)).copied().unwrap_or(1.0))
                    })
                    .collect();
                SmallDiscs::new(components, *scale).map(Some)
            }
            _ => Ok(None),
        }
    }

    pub fn build_gamma(&self) -> robin_eit_core::Result<RobinCoefficient> {
        match &self.gamma {
            GammaSpec::Constant { value } => RobinCoefficient::constant(*value),
            GammaSpec::PaperGamma => Ok(RobinCoefficient::reciprocal_exp_cos()),
            GammaSpec::Tabulated { values } => RobinCoefficient::tabulated(values.clone()),
        }
    }

    pub fn build_grid(&self) -> robin_eit_core::Result<SamplingGrid> {
        let g = &self.grid;
        let step = (g.x[1] - g.x[0]) / (g.samples.max(2) - 1) as f64;
        SamplingGrid::linspace((g.x[0], g.x[1]), (g.y[0], g.y[1]), g.samples, g.samples, g.margin.unwrap_or(step))
    }

    /// Schema-level and cross-field checks; never runs a solver.
    pub fn validate(&self, source: &str) -> Vec<Diagnostic> {
        let mut out = Vec::new();
        let mut err = |section: &str, key: &str, message: String| {
            out.push(Diagnostic { line: locate(source, section, key), message });
        };
        let r = self.resolve();

        if let Err(e) = self.build_geometry() {
            err("geometry", "kind", format!("invalid geometry: {e}"));
        }
        if let GeometrySpec::Star { shape, mean, harmonics } = &self.geometry {
            if shape.is_some() && (mean.is_some() || !harmonics.is_empty()) {
                err("geometry", "shape", "give either a named shape or mean/harmonics, not both".into());
            }
            if shape.is_none() && mean.is_none() {
                err("geometry", "kind", "star geometry needs `shape` or `mean`".into());
            }
        }
        if let GeometrySpec::SmallDiscs { centers, radii: Some(radii), .. } = &self.geometry {
            if radii.len() != centers.len() {
                err("geometry", "radii", format!("{} radii for {} centers", radii.len(), centers.len()));
            }
        }

        let gamma_values: &[f64] = match &self.gamma {
            GammaSpec::Constant { value } => core::slice::from_ref(value),
            GammaSpec::Tabulated { values } => values,
            GammaSpec::PaperGamma => &[],
        };
        let key = if matches!(self.gamma, GammaSpec::Constant { .. }) { "value" } else { "values" };
        match gamma_values.iter().copied().reduce(f64::min) {
            Some(m) if m <= 0.0 => err(
                "gamma",
                key,
                format!("γ must be strictly positive on ∂D (minimum {m}); the imaging theory assumes γ ≥ γ_min > 0"),
            ),
            _ => {
                if let Err(e) = self.build_gamma() {
                    err("gamma", "kind", format!("invalid γ: {e}"));
                }
            }
        }

        let is_discs = matches!(self.geometry, GeometrySpec::SmallDiscs { .. });
        match self.forward.path {
            ForwardPath::Series => {
                if !matches!(self.geometry, GeometrySpec::ConcentricDisc { .. }) {
                    err("forward", "path", "the series path requires a concentric_disc geometry".into());
                }
                if !matches!(self.gamma, GammaSpec::Constant { .. }) {
                    err("forward", "path", "the series path requires a constant γ".into());
                }
            }
            ForwardPath::Born | ForwardPath::Asymptotic if !is_discs => {
                err("forward", "path", "born and asymptotic data require a small_discs geometry".into())
            }
            _ => {}
        }
        if r.boundary_nodes < 4 {
            err("forward", "boundary_nodes", "need at least 4 boundary nodes".into());
        }
        if r.curve_nodes < 4 || r.curve_nodes % 2 == 1 {
            err("forward", "curve_nodes", format!("curve nodes must be even and at least 4, got {}", r.curve_nodes));
        }

        if !(self.noise.delta >= 0.0 && self.noise.delta.is_finite()) {
            err("noise", "delta", format!("noise level must be nonnegative, got {}", self.noise.delta));
        }

        match self.method.kind {
            MethodKind::Music => {
                if self.forward.path == ForwardPath::Series {
                    err("forward", "path", "MUSIC needs response data from bie, born or asymptotic".into());
                }
                if let GeometrySpec::SmallDiscs { centers, .. } = &self.geometry {
                    if r.order < centers.len() {
                        err(
                            "forward",
                            "order",
                            format!(
                                "MUSIC assumes N + 1 > J (more voltages than components): N + 1 = {} but J = {}",
                                r.order + 1,
                                centers.len()
                            ),
                        );
                    }
                }
                if !(r.rank_threshold > 0.0 && r.rank_threshold < 1.0) {
                    err("method", "rank_threshold", "rank threshold must lie in (0, 1)".into());
                }
                if r.order >= r.boundary_nodes {
                    err("forward", "order", format!("order {} must stay below boundary_nodes {}", r.order, r.boundary_nodes));
                }
            }
            MethodKind::Fm => {
                if 2 * r.order >= r.boundary_nodes {
                    err(
                        "forward",
                        "order",
                        format!("|n| ≤ {} aliases on {} boundary nodes (need 2N < K)", r.order, r.boundary_nodes),
                    );
                }
                if let Err(e) = r.filter.validate() {
                    err("method", "alpha", e.to_string());
                }
                if !(r.level > 0.0 && r.level < 1.0) {
                    err("method", "level", format!("contour level must lie in (0, 1), got {}", r.level));
                }
            }
        }

        if let Err(e) = self.build_grid() {
            err("grid", "samples", format!("invalid sampling grid: {e}"));
        }
        if let Some(s) = &self.scaling {
            if !is_discs {
                err("scaling", "scales", "scaling reports need a small_discs geometry".into());
            }
            if s.scales.len() < 2 || s.scales.iter().any(|&v| !(v > 0.0)) {
                err("scaling", "scales", "give at least two positive scales".into());
            }
        }
        if let Some(c) = &self.convergence {
            if !matches!(self.geometry, GeometrySpec::ConcentricDisc { .. }) || !matches!(self.gamma, GammaSpec::Constant { .. }) {
                err("convergence", "orders", "convergence reports need a concentric_disc with constant γ".into());
            }
            if let Some(&bad) = c.orders.iter().find(|&&n| n >= c.reference) {
                err("convergence", "orders", format!("order {bad} must be below the reference {}", c.reference));
            }
        }
        out
    }
}

fn line_of_offset(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

/// Line of `key = …` inside `[section]`, falling back to the section header.
pub fn locate(source: &str, section: &str, key: &str) -> Option<usize> {
    let mut in_section = false;
    let mut header = None;
    for (i, raw) in source.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            in_section = line.trim_matches(|c| c == '[' || c == ']').trim() == section;
            if in_section {
                header = Some(i + 1);
            }
            continue;
        }
        if in_section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    header
}

#[cfg(test)]
mod tests {
    use super::*;

    const MUSIC: &str = r#"
[geometry]
kind = "small_discs"
centers = [[-0.25, -0.25], [0.25, 0.25]]
scale = 0.01

[gamma]
kind = "constant"
value = 1.0

[forward]
path = "born"
order = 20

[method]
kind = "music"
"#;

    #[test]
    fn parses_and_validates() {
        let c = ScenarioConfig::parse(MUSIC).unwrap();
        assert!(c.validate(MUSIC).is_empty());
        let r = c.resolve();
        assert_eq!((r.order, r.boundary_nodes, r.curve_nodes), (20, 64, 32));
        assert!(r.provenance.iter().any(|(k, _, s)| k == "forward.boundary_nodes" && *s == Source::Default));
    }

    #[test]
    fn too_few_voltages_rejected() {
        let src = MUSIC.replace("order = 20", "order = 1");
        let c = ScenarioConfig::parse(&src).unwrap();
        let d = c.validate(&src);
        assert_eq!(d.len(), 1);
        assert!(d[0].message.contains("N + 1 > J"));
        assert_eq!(d[0].line, Some(13));
    }

    #[test]
    fn nonpositive_gamma_rejected() {
        let src = MUSIC.replace("value = 1.0", "value = 0.0");
        let d = ScenarioConfig::parse(&src).unwrap().validate(&src);
        assert!(d.iter().any(|d| d.message.contains("strictly positive")));
    }

    #[test]
    fn syntax_errors_carry_lines() {
        let src = MUSIC.replace("scale = 0.01", "scale = ");
        let d = ScenarioConfig::parse(&src).unwrap_err();
        assert_eq!(d[0].line, Some(5));
        let unknown = MUSIC.replace("scale = 0.01", "scale = 0.01\nwidth = 3");
        assert!(ScenarioConfig::parse(&unknown).is_err());
    }

    #[test]
    fn series_requires_concentric_disc() {
        let src = MUSIC.replace("path = \"born\"", "path = \"series\"");
        let d = ScenarioConfig::parse(&src).unwrap().validate(&src);
        assert!(d.iter().any(|d| d.message.contains("concentric_disc")));
    }
}
