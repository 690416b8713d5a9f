//! Snapshot files: a CSV of cell centers and values plus a JSON sidecar
//! holding the geometry.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Boundary, GridFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridMeta {
    pub dim: usize,
    pub origin: Vec<f64>,
    pub cell_size: f64,
    pub shape: Vec<usize>,
    pub bc: Boundary,
}

impl GridMeta {
    pub fn of(g: &GridFunction) -> Self {
        GridMeta {
            dim: g.dim(),
            origin: g.origin().to_vec(),
            cell_size: g.cell_size(),
            shape: g.shape().to_vec(),
            bc: g.bc(),
        }
    }
}

/// `foo.csv` ↦ `foo.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    csv.with_extension("json")
}

pub fn grid_csv_bytes(g: &GridFunction) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if g.dim() == 1 {
        w.write_record(["x", "value"])?;
    } else {
        w.write_record(["x", "y", "value"])?;
    }
    for j in 0..g.ny() {
        for i in 0..g.nx() {
            let c = g.center(i, j);
            let v = format!("{}", g.get(i, j));
            if g.dim() == 1 {
                w.write_record([format!("{}", c[0]), v])?;
            } else {
                w.write_record([format!("{}", c[0]), format!("{}", c[1]), v])?;
            }
        }
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

/// Write the CSV and its sidecar.
pub fn write_grid_csv(g: &GridFunction, path: &Path) -> Result<()> {
    crate::fsutil::write_atomic(path, &grid_csv_bytes(g)?)?;
    let meta = serde_json::to_vec_pretty(&GridMeta::of(g))?;
    crate::fsutil::write_atomic(&sidecar_path(path), &meta)
}

pub fn read_grid_csv(path: &Path) -> Result<GridFunction> {
    let meta: GridMeta = serde_json::from_str(&std::fs::read_to_string(sidecar_path(path))?)?;
    let mut r = csv::Reader::from_path(path)?;
    let want: Vec<&str> = if meta.dim == 1 { vec!["x", "value"] } else { vec!["x", "y", "value"] };
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != want {
        return Err(Error::Shape(format!("unexpected CSV header {header:?}")));
    }
    let mut values = Vec::new();
    let mut coords = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let nums = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| Error::Shape(format!("bad number {s:?}"))))
            .collect::<Result<Vec<f64>>>()?;
        values.push(*nums.last().expect("header fixes the width"));
        coords.push(nums[..nums.len() - 1].to_vec());
    }
    let g = GridFunction::new(meta.dim, &meta.origin, meta.cell_size, &meta.shape, values, meta.bc)?;
    let tol = 1e-9 * meta.cell_size.max(1.0);
    for (k, c) in coords.iter().enumerate() {
        let centre = g.center(k % g.nx(), k / g.nx());
        if c.iter().zip(centre).any(|(a, b)| (a - b).abs() > tol) {
            return Err(Error::Shape(format!("row {k} is not at cell center {centre:?}")));
        }
    }
    Ok(g)
}
