//! Imaging functionals sampled on a [`SamplingGrid`], with peak picking and
//! region masks.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::geometry::{Point, SamplingGrid};

/// Maxima reported by [`extract_peaks`] in automatic mode must exceed this
/// multiple of the field median.
pub const AUTO_PEAK_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Music,
    Factorization,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Music => "music",
            Method::Factorization => "factorization",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldMeta {
    pub method: Method,
    pub params: Vec<(String, f64)>,
    /// Points whose raw indicator was zero and had to be patched.
    pub patched_points: usize,
}

impl FieldMeta {
    pub fn new(method: Method) -> Self {
        Self { method, params: Vec::new(), patched_points: 0 }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.into(), value));
        self
    }
}

/// One real value per active sampling point.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorField {
    grid: SamplingGrid,
    values: Vec<f64>,
    meta: FieldMeta,
}

impl IndicatorField {
    pub fn new(grid: SamplingGrid, values: Vec<f64>, meta: FieldMeta) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} field values for {} sampling points",
                values.len(),
                grid.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("indicator field has non-finite values".into()));
        }
        Ok(Self { grid, values, meta })
    }

    pub fn grid(&self) -> &SamplingGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn meta(&self) -> &FieldMeta {
        &self.meta
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at lattice position `(column, row)`, `None` outside the disk.
    pub fn at(&self, i: usize, j: usize) -> Option<f64> {
        self.grid.active_index(i, j).map(|idx| self.values[idx])
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn median(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        let mut sorted = self.values.clone();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        if n % 2 == 1 {
            sorted[n / 2]
        } else {
            0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
        }
    }

    /// Mask of active points with value `>= level`.
    pub fn superlevel_mask(&self, level: f64) -> Vec<bool> {
        self.values.iter().map(|&v| v >= level).collect()
    }

    /// Area of `{value >= level}` counting one lattice cell per point.
    pub fn superlevel_area(&self, level: f64) -> f64 {
        let cell = self.grid.step_x() * self.grid.step_y();
        self.values.iter().filter(|&&v| v >= level).count() as f64 * cell
    }

    /// Adds a constant to every value.
    pub fn shifted(&self, offset: f64) -> Self {
        Self { grid: self.grid.clone(), values: self.values.iter().map(|v| v + offset).collect(), meta: self.meta.clone() }
    }
}

/// Intersection over union of two masks on the same grid (`1` when both are empty).
pub fn jaccard(a: &[bool], b: &[bool]) -> f64 {
    let (mut inter, mut union) = (0usize, 0usize);
    for (&x, &y) in a.iter().zip(b) {
        inter += (x && y) as usize;
        union += (x || y) as usize;
    }
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub point: Point,
    pub value: f64,
    /// Active index into the sampling grid.
    pub index: usize,
}

/// Local maxima over the 8-neighbourhood, sorted by decreasing value.
///
/// With `expected = Some(J)` the top `J` maxima are returned; otherwise all
/// maxima exceeding [`AUTO_PEAK_FACTOR`] times the field median.
pub fn extract_peaks(field: &IndicatorField, expected: Option<usize>) -> Vec<Peak> {
    let grid = field.grid();
    let values = field.values();
    let mut peaks = Vec::new();
    for idx in 0..grid.len() {
        let (i, j) = grid.lattice_index(idx);
        let v = values[idx];
        let mut is_max = true;
        'scan: for dj in -1i64..=1 {
            for di in -1i64..=1 {
                if di == 0 && dj == 0 {
                    continue;
                }
                let (ni, nj) = (i as i64 + di, j as i64 + dj);
                if ni < 0 || nj < 0 {
                    continue;
                }
                if let Some(nidx) = grid.active_index(ni as usize, nj as usize) {
                    let w = values[nidx];
                    // plateaus keep only their first point in scan order
                    if w > v || (w == v && nidx < idx) {
                        is_max = false;
                        break 'scan;
                    }
                }
            }
        }
        if is_max {
            peaks.push(Peak { point: grid.point(idx), value: v, index: idx });
        }
    }
    peaks.sort_by(|a, b| b.value.total_cmp(&a.value));
    match expected {
        Some(count) => peaks.truncate(count),
        None => {
            let cutoff = AUTO_PEAK_FACTOR * field.median();
            peaks.retain(|p| p.value > cutoff);
        }
    }
    peaks
}
