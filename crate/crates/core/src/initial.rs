//! Analytic initial-data families sampled as cell averages.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundary, GridFunction};

/// Midpoint subsamples per axis used for cell averages.
pub const SUBSAMPLES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub cells: Vec<usize>,
    pub bc: Boundary,
}

impl GridSpec {
    pub fn interval(lo: f64, hi: f64, cells: usize, bc: Boundary) -> Self {
        GridSpec { lo: vec![lo], hi: vec![hi], cells: vec![cells], bc }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn cell_size(&self) -> Result<f64> {
        let dim = self.dim();
        if !(1..=2).contains(&dim) || self.hi.len() != dim || self.cells.len() != dim {
            return Err(Error::Config("grid spec needs lo, hi and cells of length 1 or 2".into()));
        }
        if self.cells.iter().any(|&n| n == 0) || self.lo.iter().zip(&self.hi).any(|(a, b)| !(b > a)) {
            return Err(Error::Config("grid spec has an empty axis".into()));
        }
        let h = (self.hi[0] - self.lo[0]) / self.cells[0] as f64;
        for a in 1..dim {
            let ha = (self.hi[a] - self.lo[a]) / self.cells[a] as f64;
            if (ha - h).abs() > 1e-12 * h {
                return Err(Error::Config(format!("cells are not square: {h} vs {ha}")));
            }
        }
        Ok(h)
    }

    pub fn sample(&self, f: impl Fn(&[f64]) -> f64) -> Result<GridFunction> {
        let h = self.cell_size()?;
        GridFunction::sample(self.dim(), &self.lo, h, &self.cells, self.bc, SUBSAMPLES, f)
    }
}

fn one() -> f64 {
    1.0
}

fn default_radius() -> f64 {
    1.0
}

fn default_wavenumber() -> u32 {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Indicator of the box `Π [lo_a, hi_a)` scaled by `value`.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default = "one")]
        value: f64,
    },
    /// `mean + amplitude · sin(2π k Σ_a (x_a - lo_a)/L_a)` over the grid box.
    Sine {
        amplitude: f64,
        #[serde(default = "default_wavenumber")]
        wavenumber: u32,
        #[serde(default)]
        mean: f64,
    },
    /// Raised-cosine bump of the given mass, supported in the ball of
    /// `radius` around `center`.
    Bump {
        #[serde(default)]
        center: Vec<f64>,
        #[serde(default = "default_radius")]
        radius: f64,
        #[serde(default = "one")]
        mass: f64,
    },
    /// Indicator of `∪_{k=1..n} [2^k, 2^k + k]`.
    Example1 { n_blocks: u32 },
    /// Piecewise constant with `pieces` random levels per axis in
    /// `[lo, hi]`; breaks fall at random points of the grid box. On a
    /// far-field grid the outer fifth of each side keeps the far-field value.
    Random {
        pieces: usize,
        lo: f64,
        hi: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    /// `value` everywhere.
    Constant { value: f64 },
}

impl InitialSpec {
    pub fn is_random(&self) -> bool {
        matches!(self, InitialSpec::Random { .. })
    }
}

pub fn example1_blocks(n_blocks: u32) -> Vec<(f64, f64)> {
    (1..=n_blocks)
        .map(|k| {
            let a = 2f64.powi(k as i32);
            (a, a + k as f64)
        })
        .collect()
}

pub fn bump_value(center: &[f64], radius: f64, mass: f64, x: &[f64]) -> f64 {
    let rho = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum::<f64>().sqrt();
    if rho >= radius {
        return 0.0;
    }
    let shape = 0.5 * (1.0 + (PI * rho / radius).cos());
    let volume = match x.len() {
        1 => radius,
        _ => PI * radius * radius * (0.5 - 2.0 / (PI * PI)),
    };
    mass * shape / volume
}

/// Sample `spec` on `grid`. `seed` is used by the random family when the
/// spec carries none.
pub fn build_initial(spec: &InitialSpec, grid: &GridSpec, seed: Option<u64>) -> Result<GridFunction> {
    let dim = grid.dim();
    grid.cell_size()?;
    match spec {
        InitialSpec::Box { lo, hi, value } => {
            if lo.len() != dim || hi.len() != dim {
                return Err(Error::Config("box corners must match the grid dimension".into()));
            }
            grid.sample(|x| {
                let inside = x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| *v >= *a && *v < *b);
                if inside { *value } else { 0.0 }
            })
        }
        InitialSpec::Sine { amplitude, wavenumber, mean } => {
            let k = *wavenumber as f64;
            grid.sample(|x| {
                let phase: f64 = (0..dim).map(|a| (x[a] - grid.lo[a]) / (grid.hi[a] - grid.lo[a])).sum();
                mean + amplitude * (2.0 * PI * k * phase).sin()
            })
        }
        InitialSpec::Bump { center, radius, mass } => {
            let center = if center.is_empty() { vec![0.0; dim] } else { center.clone() };
            if center.len() != dim || !(*radius > 0.0) {
                return Err(Error::Config("bump needs a center of the grid dimension and a positive radius".into()));
            }
            grid.sample(|x| bump_value(&center, *radius, *mass, x))
        }
        InitialSpec::Example1 { n_blocks } => {
            if *n_blocks == 0 {
                return Err(Error::Config("example1 needs at least one block".into()));
            }
            if dim != 1 {
                return Err(Error::Config("example1 data are one-dimensional".into()));
            }
            let blocks = example1_blocks(*n_blocks);
            let (a, b) = (blocks[0].0, blocks[blocks.len() - 1].1);
            if grid.lo[0] > a || grid.hi[0] < b {
                return Err(Error::Config(format!(
                    "domain [{}, {}] does not contain the blocks [{a}, {b}]",
                    grid.lo[0], grid.hi[0]
                )));
            }
            grid.sample(|x| {
                if blocks.iter().any(|&(p, q)| x[0] >= p && x[0] < q) { 1.0 } else { 0.0 }
            })
        }
        InitialSpec::Random { pieces, lo, hi, seed: own } => {
            let Some(seed) = own.or(seed) else {
                return Err(Error::Config("random initial data need a seed".into()));
            };
            if *pieces == 0 || !(hi >= lo) {
                return Err(Error::Config("random data need pieces >= 1 and lo <= hi".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let cuts: Vec<Vec<f64>> = (0..dim)
                .map(|a| {
                    let mut c: Vec<f64> = (1..*pieces).map(|_| rng.gen_range(grid.lo[a]..grid.hi[a])).collect();
                    c.sort_by(f64::total_cmp);
                    c
                })
                .collect();
            let levels: Vec<f64> = (0..pieces.pow(dim as u32)).map(|_| rng.gen_range(*lo..=*hi)).collect();
            let far = match grid.bc {
                Boundary::FarField(f) => Some(f),
                Boundary::Periodic => None,
            };
            grid.sample(|x| {
                if let Some(f) = far {
                    let outer = (0..dim).any(|a| {
                        let margin = 0.2 * (grid.hi[a] - grid.lo[a]);
                        x[a] < grid.lo[a] + margin || x[a] > grid.hi[a] - margin
                    });
                    if outer {
                        return f;
                    }
                }
                let mut idx = 0;
                for a in (0..dim).rev() {
                    let k = cuts[a].partition_point(|&c| c <= x[a]);
                    idx = idx * pieces + k;
                }
                levels[idx]
            })
        }
        InitialSpec::Constant { value } => grid.sample(|_| *value),
    }
}
