//! Window norms and simple functionals.
//!
//! Windows are centered at cell centers. For far-field grids the centers run
//! past the box far enough to see every window that touches it, and a window
//! lying entirely in the far field is included as a candidate.
//!
//! In 1D a ball is an interval and cells are weighted by their exact overlap
//! with it. In 2D a cell belongs to the ball iff its center is strictly
//! within the radius. Box windows always use exact overlap weights.

use super::{Boundary, GridFunction};
use crate::error::{Error, Result};

/// `x_norm` with the unit ball: `sup_y ∫_{|x-y|<radius} |u|`.
pub fn x_norm(g: &GridFunction, radius: f64) -> Result<f64> {
    if !(radius >= g.cell_size()) {
        return Err(Error::Config(format!(
            "window radius {radius} is smaller than the cell size {}",
            g.cell_size()
        )));
    }
    let rho = radius / g.cell_size();
    Ok(match g.dim() {
        1 => interval_norm(g, rho),
        _ => disc_norm(g, rho),
    })
}

/// Window norm for the box `Π [-half_i, half_i]`.
pub fn v_norm(g: &GridFunction, half: &[f64]) -> Result<f64> {
    if half.len() != g.dim() || half.iter().any(|&h| !(h > 0.0 && h.is_finite())) {
        return Err(Error::Config(format!("degenerate window half-extents {half:?}")));
    }
    let h = g.cell_size();
    Ok(match g.dim() {
        1 => interval_norm(g, half[0] / h),
        _ => box_norm(g, half[0] / h, half[1] / h),
    })
}

/// Covering counts relating the unit-ball norm and the norm of the cube
/// `[-1, 1]^dim`: `v ≤ m1·x` and `x ≤ m2·v`.
///
/// Both come from covering a closed window by `2^dim` translates of the
/// other one, shifted by `±1/2` along each axis. The bounds hold for the
/// discrete norms when `1/2` is a whole number of cells, so the shifted
/// centers are again cell centers, and the cell size is below `0.4`.
pub fn covering_constants(dim: usize) -> (f64, f64) {
    let m = (1usize << dim) as f64;
    (m, m)
}

/// Running integral of `|u|` along one row in cell units, extended past
/// the box according to the boundary condition.
struct RowCumulative {
    prefix: Vec<f64>,
    far: Option<f64>,
}

impl RowCumulative {
    fn new(row: impl Iterator<Item = f64>, bc: Boundary) -> Self {
        let mut prefix = vec![0.0];
        let mut acc = 0.0;
        for v in row {
            acc += v.abs();
            prefix.push(acc);
        }
        let far = match bc {
            Boundary::FarField(v) => Some(v.abs()),
            Boundary::Periodic => None,
        };
        RowCumulative { prefix, far }
    }

    fn n(&self) -> isize {
        self.prefix.len() as isize - 1
    }

    fn cell(&self, k: isize) -> f64 {
        let n = self.n();
        match self.far {
            Some(f) if k < 0 || k >= n => f,
            _ => {
                let m = k.rem_euclid(n) as usize;
                self.prefix[m + 1] - self.prefix[m]
            }
        }
    }

    /// `Σ_{m < k} |u_m|` relative to cell 0.
    fn at(&self, k: isize) -> f64 {
        let n = self.n();
        match self.far {
            Some(f) if k < 0 => k as f64 * f,
            Some(f) if k > n => self.prefix[n as usize] + (k - n) as f64 * f,
            Some(_) => self.prefix[k as usize],
            None => {
                k.div_euclid(n) as f64 * self.prefix[n as usize] + self.prefix[k.rem_euclid(n) as usize]
            }
        }
    }

    fn at_real(&self, s: f64) -> f64 {
        let k = s.floor();
        let ki = k as isize;
        self.at(ki) + (s - k) * self.cell(ki)
    }

    /// `Σ_{a ≤ m ≤ b} |u_m|`.
    fn sum(&self, a: isize, b: isize) -> f64 {
        self.at(b + 1) - self.at(a)
    }
}

fn center_range(g: &GridFunction, axis: usize, reach: f64) -> std::ops::Range<isize> {
    let n = g.shape()[axis] as isize;
    match g.bc() {
        Boundary::Periodic => 0..n,
        Boundary::FarField(_) => {
            let pad = reach.ceil() as isize + 1;
            -pad..n + pad
        }
    }
}

fn interval_norm(g: &GridFunction, rho: f64) -> f64 {
    let row = RowCumulative::new(g.values().iter().copied(), g.bc());
    let h = g.cell_size();
    let mut best = g.far_field().map_or(0.0, |f| 2.0 * rho * f.abs() * h);
    for i in center_range(g, 0, rho) {
        let c = i as f64 + 0.5;
        best = best.max((row.at_real(c + rho) - row.at_real(c - rho)) * h);
    }
    best
}

fn rows(g: &GridFunction) -> Vec<RowCumulative> {
    let nx = g.nx();
    (0..g.ny())
        .map(|j| RowCumulative::new(g.values()[j * nx..(j + 1) * nx].iter().copied(), g.bc()))
        .collect()
}

fn row_sum(g: &GridFunction, rows: &[RowCumulative], j: isize, a: isize, b: isize) -> f64 {
    let ny = g.ny() as isize;
    match g.bc() {
        Boundary::Periodic => rows[j.rem_euclid(ny) as usize].sum(a, b),
        Boundary::FarField(f) => {
            if (0..ny).contains(&j) {
                rows[j as usize].sum(a, b)
            } else {
                (b - a + 1) as f64 * f.abs()
            }
        }
    }
}

fn disc_norm(g: &GridFunction, rho: f64) -> f64 {
    let k = rho.floor() as isize;
    // half-widths w(dj) with di² + dj² < ρ²
    let spans: Vec<(isize, isize)> = (-k..=k)
        .filter_map(|dj| {
            let rem = rho * rho - (dj * dj) as f64;
            if rem <= 0.0 {
                return None;
            }
            let mut w = rem.sqrt().floor() as isize;
            if (w * w) as f64 >= rem {
                w -= 1;
            }
            (w >= 0).then_some((dj, w))
        })
        .collect();
    let vol = g.cell_volume();
    let count: isize = spans.iter().map(|&(_, w)| 2 * w + 1).sum();
    let mut best = g.far_field().map_or(0.0, |f| count as f64 * f.abs() * vol);
    let rows = rows(g);
    for j in center_range(g, 1, rho) {
        for i in center_range(g, 0, rho) {
            let mass: f64 = spans.iter().map(|&(dj, w)| row_sum(g, &rows, j + dj, i - w, i + w)).sum();
            best = best.max(mass * vol);
        }
    }
    best
}

/// Overlap of cells `[d - 1/2, d + 1/2]` with `[-rho, rho]`, in cell units.
fn overlap_weights(rho: f64) -> (isize, Vec<f64>) {
    let k = (rho + 0.5).ceil() as isize;
    let w = (-k..=k)
        .map(|d| {
            let lo = (d as f64 - 0.5).max(-rho);
            let hi = (d as f64 + 0.5).min(rho);
            (hi - lo).max(0.0)
        })
        .collect();
    (k, w)
}

fn box_norm(g: &GridFunction, rx: f64, ry: f64) -> f64 {
    let (kx, wx) = overlap_weights(rx);
    let (ky, wy) = overlap_weights(ry);
    let vol = g.cell_volume();
    let ci = center_range(g, 0, rx);
    let cj = center_range(g, 1, ry);
    let width = (ci.end - ci.start) as usize;
    // horizontal pass on rows cj ± ky
    let j0 = cj.start - ky;
    let j1 = cj.end + ky;
    let mut horiz = Vec::with_capacity(width * (j1 - j0) as usize);
    for j in j0..j1 {
        for i in ci.clone() {
            let s: f64 = (-kx..=kx)
                .zip(&wx)
                .map(|(d, &w)| w * g.value_at(i + d, j).abs())
                .sum();
            horiz.push(s);
        }
    }
    let mut best = g.far_field().map_or(0.0, |f| 4.0 * rx * ry * f.abs() * vol);
    for j in cj.clone() {
        for (col, _) in ci.clone().enumerate() {
            let s: f64 = (-ky..=ky)
                .zip(&wy)
                .map(|(d, &w)| w * horiz[(j + d - j0) as usize * width + col])
                .sum();
            best = best.max(s * vol);
        }
    }
    best
}

/// `∫ (u - v)⁺` over the common box.
pub fn l1_plus(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    u.require_same_geometry(v)?;
    Ok(u.values()
        .iter()
        .zip(v.values())
        .map(|(a, b)| (a - b).max(0.0))
        .sum::<f64>()
        * u.cell_volume())
}

/// `∫ (u - k)⁺` over the box.
pub fn l1_plus_const(u: &GridFunction, k: f64) -> f64 {
    u.values().iter().map(|a| (a - k).max(0.0)).sum::<f64>() * u.cell_volume()
}

/// Measure of `{|u| > λ}`; infinite when the far field itself exceeds `λ`.
pub fn superlevel_measure(g: &GridFunction, lambda: f64) -> f64 {
    if let Some(f) = g.far_field() {
        if f.abs() > lambda {
            return f64::INFINITY;
        }
    }
    g.values().iter().filter(|v| v.abs() > lambda).count() as f64 * g.cell_volume()
}
