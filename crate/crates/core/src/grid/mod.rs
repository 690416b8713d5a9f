//! Cell-average grid functions on uniform 1D/2D meshes.

mod io;
mod lattice;
mod norms;
mod periodize;

pub use io::{grid_csv_bytes, read_grid_csv, sidecar_path, write_grid_csv, GridMeta};
pub use lattice::{lattice_meets_subspaces, make_lattice, LatticeSpec};
pub use norms::{covering_constants, l1_plus, l1_plus_const, superlevel_measure, v_norm, x_norm};
pub use periodize::{periodize_inf, periodize_sup, shift_mean, Periodization};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Periodic,
    /// Constant state outside the stored box.
    FarField(f64),
}

/// Cell averages on `shape[0] × shape[1]` cells, x fastest. In 1D
/// `shape[1] == 1` and `origin[1] == 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    dim: usize,
    origin: [f64; 2],
    cell_size: f64,
    shape: [usize; 2],
    values: Vec<f64>,
    bc: Boundary,
}

impl GridFunction {
    pub fn new(
        dim: usize,
        origin: &[f64],
        cell_size: f64,
        shape: &[usize],
        values: Vec<f64>,
        bc: Boundary,
    ) -> Result<Self> {
        if !(1..=2).contains(&dim) || origin.len() != dim || shape.len() != dim {
            return Err(Error::Shape(format!(
                "dim {dim} with origin of length {} and shape of length {}",
                origin.len(),
                shape.len()
            )));
        }
        if !(cell_size > 0.0 && cell_size.is_finite()) {
            return Err(Error::Shape(format!("cell size must be positive, got {cell_size}")));
        }
        if shape.iter().any(|&n| n == 0) {
            return Err(Error::Shape("empty grid".into()));
        }
        let shape2 = [shape[0], if dim == 2 { shape[1] } else { 1 }];
        if values.len() != shape2[0] * shape2[1] {
            return Err(Error::Shape(format!(
                "{} values for {} cells",
                values.len(),
                shape2[0] * shape2[1]
            )));
        }
        if values.iter().any(|v| !v.is_finite()) || origin.iter().any(|v| !v.is_finite()) {
            return Err(Error::Shape("non-finite grid data".into()));
        }
        if let Boundary::FarField(v) = bc {
            if !v.is_finite() {
                return Err(Error::Shape("non-finite far-field value".into()));
            }
        }
        let origin2 = [origin[0], if dim == 2 { origin[1] } else { 0.0 }];
        Ok(GridFunction { dim, origin: origin2, cell_size, shape: shape2, values, bc })
    }

    /// 1D grid with `n` cells covering `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64, n: usize, bc: Boundary) -> Result<Self> {
        if !(hi > lo) {
            return Err(Error::Shape(format!("empty interval [{lo}, {hi}]")));
        }
        GridFunction::new(1, &[lo], (hi - lo) / n as f64, &[n], vec![0.0; n.max(1)], bc)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin[..self.dim]
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape[..self.dim]
    }

    pub fn nx(&self) -> usize {
        self.shape[0]
    }

    pub fn ny(&self) -> usize {
        self.shape[1]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn bc(&self) -> Boundary {
        self.bc
    }

    pub fn far_field(&self) -> Option<f64> {
        match self.bc {
            Boundary::FarField(v) => Some(v),
            Boundary::Periodic => None,
        }
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_size.powi(self.dim as i32)
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.shape[0] + i
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.index(i, j)]
    }

    /// Value at integer cell coordinates, possibly outside the box.
    pub fn value_at(&self, i: isize, j: isize) -> f64 {
        let (nx, ny) = (self.shape[0] as isize, self.shape[1] as isize);
        match self.bc {
            Boundary::Periodic => self.get(i.rem_euclid(nx) as usize, j.rem_euclid(ny) as usize),
            Boundary::FarField(v) => {
                if (0..nx).contains(&i) && (0..ny).contains(&j) {
                    self.get(i as usize, j as usize)
                } else {
                    v
                }
            }
        }
    }

    pub fn center(&self, i: usize, j: usize) -> [f64; 2] {
        let h = self.cell_size;
        [
            self.origin[0] + (i as f64 + 0.5) * h,
            if self.dim == 2 { self.origin[1] + (j as f64 + 0.5) * h } else { 0.0 },
        ]
    }

    pub fn extent(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|a| (self.origin[a], self.origin[a] + self.shape[a] as f64 * self.cell_size))
            .collect()
    }

    /// Same geometry with new values.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        GridFunction::new(self.dim, self.origin(), self.cell_size, self.shape(), values, self.bc)
    }

    pub fn with_bc(&self, bc: Boundary) -> Result<Self> {
        GridFunction::new(self.dim, self.origin(), self.cell_size, self.shape(), self.values.clone(), bc)
    }

    pub fn constant_like(&self, c: f64) -> Self {
        let bc = match self.bc {
            Boundary::Periodic => Boundary::Periodic,
            Boundary::FarField(_) => Boundary::FarField(c),
        };
        GridFunction { values: vec![c; self.values.len()], bc, ..self.clone() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let bc = match self.bc {
            Boundary::FarField(v) => Boundary::FarField(f(v)),
            b => b,
        };
        GridFunction::new(self.dim, self.origin(), self.cell_size, self.shape(), self.values.iter().map(|&v| f(v)).collect(), bc)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Σ u · cell volume over the stored box.
    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.cell_volume()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).sum::<f64>() * self.cell_volume()
    }

    /// Box average.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// `(1/|box|) ∫ |u - c|` over the box.
    pub fn mean_abs_deviation(&self, c: f64) -> f64 {
        self.values.iter().map(|v| (v - c).abs()).sum::<f64>() / self.values.len() as f64
    }

    pub fn same_geometry(&self, other: &GridFunction) -> bool {
        self.dim == other.dim
            && self.shape == other.shape
            && self.origin == other.origin
            && self.cell_size == other.cell_size
    }

    pub fn require_same_geometry(&self, other: &GridFunction) -> Result<()> {
        if self.same_geometry(other) {
            Ok(())
        } else {
            Err(Error::Shape("grid geometries differ".into()))
        }
    }

    /// Cell averages of `f` using `sub` midpoint subsamples per axis.
    pub fn sample(
        dim: usize,
        origin: &[f64],
        cell_size: f64,
        shape: &[usize],
        bc: Boundary,
        sub: usize,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let sub = sub.max(1);
        let (nx, ny) = (shape[0], if dim == 2 { shape.get(1).copied().unwrap_or(1) } else { 1 });
        let mut values = Vec::with_capacity(nx * ny);
        let offs: Vec<f64> = (0..sub).map(|s| (s as f64 + 0.5) / sub as f64).collect();
        for j in 0..ny {
            for i in 0..nx {
                let mut acc = 0.0;
                if dim == 1 {
                    for &a in &offs {
                        acc += f(&[origin[0] + (i as f64 + a) * cell_size]);
                    }
                    values.push(acc / sub as f64);
                } else {
                    for &b in &offs {
                        for &a in &offs {
                            acc += f(&[
                                origin[0] + (i as f64 + a) * cell_size,
                                origin[1] + (j as f64 + b) * cell_size,
                            ]);
                        }
                    }
                    values.push(acc / (sub * sub) as f64);
                }
            }
        }
        GridFunction::new(dim, origin, cell_size, shape, values, bc)
    }

    /// Periodic copy of `self` on a larger cell-aligned box. Each side of the
    /// new box must be a whole number of periods.
    pub fn tile_periodic(&self, origin: &[f64], shape: &[usize]) -> Result<Self> {
        if self.bc != Boundary::Periodic {
            return Err(Error::Config("tiling needs a periodic grid function".into()));
        }
        if origin.len() != self.dim || shape.len() != self.dim {
            return Err(Error::Shape("tiling box has wrong dimension".into()));
        }
        let mut offset = [0isize; 2];
        for a in 0..self.dim {
            if shape[a] % self.shape[a] != 0 {
                return Err(Error::Config(format!(
                    "tiling box of {} cells is not a multiple of the period {}",
                    shape[a], self.shape[a]
                )));
            }
            let d = (origin[a] - self.origin[a]) / self.cell_size;
            if (d - d.round()).abs() > 1e-9 {
                return Err(Error::Config("tiling box is not cell-aligned".into()));
            }
            offset[a] = d.round() as isize;
        }
        let (nx, ny) = (shape[0], if self.dim == 2 { shape[1] } else { 1 });
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(self.value_at(i as isize + offset[0], j as isize + offset[1]));
            }
        }
        GridFunction::new(self.dim, origin, self.cell_size, shape, values, Boundary::Periodic)
    }
}
