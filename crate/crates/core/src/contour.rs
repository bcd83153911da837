//! Marching-squares level curves of an [`IndicatorField`].

use alloc::format;
use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::field::IndicatorField;
use crate::geometry::Point;

/// Piecewise-linear level curve as an unordered list of segments.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Contour {
    pub level: f64,
    pub segments: Vec<[Point; 2]>,
}

impl Contour {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    /// Segment endpoints (each interior vertex appears twice).
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.segments.iter().flat_map(|s| s.iter().copied())
    }

    /// Mean distance of the vertices from `center`.
    pub fn mean_radius(&self, center: Point) -> f64 {
        let n = 2 * self.segments.len();
        if n == 0 {
            return 0.0;
        }
        self.points().map(|p| p.distance(center)).sum::<f64>() / n as f64
    }

    /// Standard deviation of the vertex distances from `center`.
    pub fn radial_std(&self, center: Point) -> f64 {
        let n = 2 * self.segments.len();
        if n == 0 {
            return 0.0;
        }
        let mean = self.mean_radius(center);
        (self.points().map(|p| (p.distance(center) - mean).powi(2)).sum::<f64>() / n as f64).sqrt()
    }
}

// edges: 0 bottom (c0-c1), 1 right (c1-c2), 2 top (c3-c2), 3 left (c0-c3)
const EDGE_PAIRS: [&[(u8, u8)]; 16] = [
    &[],
    &[(3, 0)],
    &[(0, 1)],
    &[(3, 1)],
    &[(1, 2)],
    &[], // saddle
    &[(0, 2)],
    &[(3, 2)],
    &[(2, 3)],
    &[(0, 2)],
    &[], // saddle
    &[(1, 2)],
    &[(1, 3)],
    &[(0, 1)],
    &[(3, 0)],
    &[],
];

/// Level curve `{W = level}` traced cell by cell with linear interpolation
/// along cell edges. Cells with a corner outside the sampled disk are skipped;
/// ambiguous saddle cells are resolved by the cell-centre average.
pub fn level_set(field: &IndicatorField, level: f64) -> Result<Contour> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!("level {level} must lie in (0, 1)")));
    }
    trace(field, level)
}

/// Same as [`level_set`] without the `(0, 1)` restriction on the level.
pub fn trace(field: &IndicatorField, level: f64) -> Result<Contour> {
    let grid = field.grid();
    let (xs, ys) = (grid.xs(), grid.ys());
    let mut segments = Vec::new();
    for j in 0..grid.ny() - 1 {
        for i in 0..grid.nx() - 1 {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let mut v = [0.0; 4];
            let mut complete = true;
            for (slot, &(ci, cj)) in corners.iter().enumerate() {
                match field.at(ci, cj) {
                    Some(value) => v[slot] = value,
                    None => {
                        complete = false;
                        break;
                    }
                }
            }
            if !complete {
                continue;
            }
            let pos = corners.map(|(ci, cj)| Point::new(xs[ci], ys[cj]));
            let case = v.iter().enumerate().fold(0usize, |acc, (b, &val)| acc | (((val >= level) as usize) << b));
            let edge_point = |edge: u8| -> Point {
                let (a, b) = match edge {
                    0 => (0, 1),
                    1 => (1, 2),
                    2 => (3, 2),
                    _ => (0, 3),
                };
                let t = (level - v[a]) / (v[b] - v[a]);
                Point::new(pos[a].x + t * (pos[b].x - pos[a].x), pos[a].y + t * (pos[b].y - pos[a].y))
            };
            let center_inside = 0.25 * (v[0] + v[1] + v[2] + v[3]) >= level;
            let pairs: &[(u8, u8)] = match (case, center_inside) {
                (5, true) => &[(0, 1), (2, 3)],
                (5, false) => &[(3, 0), (1, 2)],
                (10, true) => &[(3, 0), (1, 2)],
                (10, false) => &[(0, 1), (2, 3)],
                _ => EDGE_PAIRS[case],
            };
            for &(a, b) in pairs {
                segments.push([edge_point(a), edge_point(b)]);
            }
        }
    }
    Ok(Contour { level, segments })
}
