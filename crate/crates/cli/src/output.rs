//! File formats: field and spectrum CSV, key/value metadata, 8-bit PGM.
//! Every file is written to a temporary sibling and renamed into place.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use robin_eit_core::contour::Contour;
use robin_eit_core::field::{FieldMeta, IndicatorField, Method};
use robin_eit_core::SamplingGrid;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn csv_bytes<T: Serialize>(rows: impl IntoIterator<Item = T>) -> io::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).map_err(io::Error::other)?;
    }
    w.into_inner().map_err(|e| io::Error::other(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
struct FieldRow {
    x: f64,
    y: f64,
    #[serde(rename = "W")]
    w: f64,
}

/// `x,y,W` for every active sampling point, in grid order. Floats use the
/// shortest representation that parses back to the same value.
pub fn field_csv(field: &IndicatorField) -> io::Result<Vec<u8>> {
    let grid = field.grid();
    csv_bytes(grid.points().zip(field.values()).map(|(p, &w)| FieldRow { x: p.x, y: p.y, w }))
}

/// Reads a field written by [`field_csv`] back onto `grid`; coordinates must
/// match the grid exactly.
pub fn read_field_csv(path: &Path, grid: &SamplingGrid, method: Method) -> io::Result<IndicatorField> {
    let mut reader = csv::Reader::from_path(path).map_err(io::Error::other)?;
    let mut values = Vec::with_capacity(grid.len());
    for (idx, row) in reader.deserialize::<FieldRow>().enumerate() {
        let row = row.map_err(io::Error::other)?;
        if idx >= grid.len() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "more rows than sampling points"));
        }
        let p = grid.point(idx);
        if p.x != row.x || p.y != row.y {
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("row {} at ({}, {}) does not match grid point {p}", idx + 1, row.x, row.y),
            ));
        }
        values.push(row.w);
    }
    IndicatorField::new(grid.clone(), values, FieldMeta::new(method))
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e.to_string()))
}

#[derive(Serialize)]
struct SpectrumRow {
    j: usize,
    sigma: f64,
}

/// `j,sigma` with `j` starting at 1.
pub fn spectrum_csv(values: &[f64]) -> io::Result<Vec<u8>> {
    csv_bytes(values.iter().enumerate().map(|(i, &s)| SpectrumRow { j: i + 1, sigma: s }))
}

#[derive(Serialize)]
struct SegmentRow {
    x0: f64,
    y0: f64,
    x1: f64,
    y1: f64,
}

pub fn contour_csv(contour: &Contour) -> io::Result<Vec<u8>> {
    csv_bytes(contour.segments.iter().map(|[a, b]| SegmentRow { x0: a.x, y0: a.y, x1: b.x, y1: b.y }))
}

pub fn rows_csv<T: Serialize>(rows: impl IntoIterator<Item = T>) -> io::Result<Vec<u8>> {
    csv_bytes(rows)
}

/// Binary 8-bit graymap, top row first (largest `y`). Values are
/// `round(255 · W / max W)`; points outside the sampled disk are black.
pub fn pgm(field: &IndicatorField) -> Vec<u8> {
    let grid = field.grid();
    let (nx, ny) = (grid.nx(), grid.ny());
    let max = field.max();
    let mut out = format!("P5\n{nx} {ny}\n255\n").into_bytes();
    for j in (0..ny).rev() {
        for i in 0..nx {
            let v = field.at(i, j).map(|w| if max > 0.0 { w / max } else { 0.0 }).unwrap_or(0.0);
            out.push((255.0 * v.clamp(0.0, 1.0)).round() as u8);
        }
    }
    out
}

/// Key/value metadata as TOML.
pub fn metadata<T: Serialize>(report: &T) -> io::Result<Vec<u8>> {
    toml::to_string_pretty(report).map(String::into_bytes).map_err(io::Error::other)
}
