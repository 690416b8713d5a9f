//! Lattice periodization of compactly supported data and mean shifts.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{Boundary, GridFunction, LatticeSpec};
use crate::error::{Error, Result};

/// Largest number of cells allowed in a period box.
pub const MAX_PERIOD_CELLS: usize = 1 << 24;
const ALIGN_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Periodization {
    /// Periodic function on a rectangular box whose lattice lies in `rL`.
    pub grid: GridFunction,
    /// Scale actually used after snapping `r·basis` to whole cells.
    pub r: f64,
    /// `rL` basis in cell units.
    pub cell_basis: Vec<Vec<i64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
enum Extremum {
    Sup,
    Inf,
}

/// `v⁺(x) = sup_{e ∈ L} u0(x + r e)`, with the far field contributing 0.
pub fn periodize_sup(u0: &GridFunction, lattice: &LatticeSpec, r: f64) -> Result<Periodization> {
    periodize(u0, lattice, r, Extremum::Sup)
}

/// `v⁻(x) = inf_{e ∈ L} u0(x + r e)`, with the far field contributing 0.
pub fn periodize_inf(u0: &GridFunction, lattice: &LatticeSpec, r: f64) -> Result<Periodization> {
    periodize(u0, lattice, r, Extremum::Inf)
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Snap `r` so that every entry of `r·basis` is a whole number of cells.
fn snap(lattice: &LatticeSpec, r: f64, h: f64) -> Result<(f64, Vec<Vec<i64>>)> {
    let basis = lattice.basis();
    let &pivot = basis
        .iter()
        .flatten()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .expect("nonempty basis");
    let cells = (r * pivot / h).round();
    if cells == 0.0 {
        return Err(Error::Config(format!("r={r} is below one cell")));
    }
    let r_snapped = cells * h / pivot;
    let mut out = Vec::new();
    for row in basis {
        let mut o = Vec::new();
        for &b in row {
            let c = r_snapped * b / h;
            if (c - c.round()).abs() > ALIGN_TOL * c.abs().max(1.0) {
                return Err(Error::Config(format!(
                    "r·basis is not cell-aligned after snapping r to {r_snapped}"
                )));
            }
            o.push(c.round() as i64);
        }
        out.push(o);
    }
    Ok((r_snapped, out))
}

fn periodize(u0: &GridFunction, lattice: &LatticeSpec, r: f64, which: Extremum) -> Result<Periodization> {
    if u0.far_field() != Some(0.0) {
        return Err(Error::Config("periodization needs compactly supported data (far field 0)".into()));
    }
    if lattice.dim() != u0.dim() {
        return Err(Error::Shape("lattice and grid dimensions differ".into()));
    }
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::Config(format!("r must be positive, got {r}")));
    }
    let (r, m) = snap(lattice, r, u0.cell_size())?;
    let dim = u0.dim();

    // rectangular period box N_1 × N_2 with diag(N)ℤ² ⊂ Mℤ²
    let shape: Vec<usize> = if dim == 1 {
        vec![m[0][0].unsigned_abs() as usize]
    } else {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        // adj(M) = [[m11, -m01], [-m10, m00]]
        let n1 = det.abs() / gcd(gcd(m[1][1], m[1][0]), det);
        let n2 = det.abs() / gcd(gcd(m[0][1], m[0][0]), det);
        vec![n1 as usize, n2 as usize]
    };
    let cells: usize = shape.iter().product();
    if cells > MAX_PERIOD_CELLS {
        return Err(Error::Config(format!("period box needs {cells} cells")));
    }
    let (nx, ny) = (shape[0] as i64, if dim == 2 { shape[1] as i64 } else { 1 });

    // representatives of rL modulo the box lattice
    let gens: Vec<(i64, i64)> = (0..dim)
        .map(|c| (m[0][c], if dim == 2 { m[1][c] } else { 0 }))
        .collect();
    let mut reps = BTreeSet::from([(0i64, 0i64)]);
    let mut frontier = vec![(0i64, 0i64)];
    while let Some(p) = frontier.pop() {
        for g in &gens {
            let q = ((p.0 + g.0).rem_euclid(nx), (p.1 + g.1).rem_euclid(ny));
            if reps.insert(q) {
                frontier.push(q);
            }
        }
    }

    let mut out = vec![0.0f64; cells];
    for j in 0..u0.ny() {
        for i in 0..u0.nx() {
            let v = u0.get(i, j);
            for q in &reps {
                let x = (i as i64 + q.0).rem_euclid(nx);
                let y = (j as i64 + q.1).rem_euclid(ny);
                let slot = &mut out[(y * nx + x) as usize];
                *slot = match which {
                    Extremum::Sup => slot.max(v),
                    Extremum::Inf => slot.min(v),
                };
            }
        }
    }
    let grid = GridFunction::new(dim, u0.origin(), u0.cell_size(), &shape, out, Boundary::Periodic)?;
    Ok(Periodization { grid, r, cell_basis: m })
}

/// Add the constant that moves the box mean to `target`.
pub fn shift_mean(g: &GridFunction, target: f64) -> Result<GridFunction> {
    if g.bc() != Boundary::Periodic {
        return Err(Error::Config("mean shift needs a periodic grid function".into()));
    }
    let shift = target - g.mean();
    g.map(|v| v + shift)
}
