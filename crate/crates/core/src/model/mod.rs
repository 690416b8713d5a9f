//! Flux and diffusion nonlinearities of `u_t + div φ(u) - D²·A(u) = 0`.

mod gn;
mod io;
mod piecewise;
mod poly;
mod tg;

pub use gn::{check_gn, nearest_f_values, thm_hypothesis_periodic, GnReport, HypothesisReport};
pub use io::{Coef, ModelFile, PiecewisePolyDef};
pub use piecewise::{primitive, PiecewisePoly, CONTINUITY_TOL};
pub use poly::{roots_in, Poly};
pub use tg::tg_apply;

use crate::error::{Error, Result};

/// Sample count used by the nonnegativity check of the diffusion matrix.
pub const PSD_SAMPLES: usize = 1000;
/// Minimum eigenvalue accepted for a nonnegative definite matrix.
pub const PSD_TOL: f64 = -1e-10;

/// Scalar convection-diffusion model in one or two space dimensions.
#[derive(Debug, Clone)]
pub struct ScalarModel {
    name: Option<String>,
    dim: usize,
    flux: Vec<PiecewisePoly>,
    diffusion: Vec<Vec<PiecewisePoly>>,
    primitive: Vec<Vec<PiecewisePoly>>,
    urange: (f64, f64),
}

impl ScalarModel {
    pub fn new(
        flux: Vec<PiecewisePoly>,
        diffusion: Vec<Vec<PiecewisePoly>>,
        urange: (f64, f64),
    ) -> Result<Self> {
        let dim = flux.len();
        if !(1..=2).contains(&dim) {
            return Err(Error::Config(format!("dimension must be 1 or 2, got {dim}")));
        }
        if diffusion.len() != dim || diffusion.iter().any(|row| row.len() != dim) {
            return Err(Error::Config(format!("diffusion must be a {dim}x{dim} matrix")));
        }
        let (lo, hi) = urange;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("invalid urange [{lo}, {hi}]")));
        }
        let flux = flux
            .into_iter()
            .enumerate()
            .map(|(i, f)| {
                f.into_continuous()
                    .map_err(|e| Error::Config(format!("flux component {i}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        for i in 0..dim {
            for j in 0..i {
                if !diffusion[i][j].same_function(&diffusion[j][i]) {
                    return Err(Error::Config(format!("diffusion is not symmetric at ({i},{j})")));
                }
            }
        }
        let primitive = diffusion
            .iter()
            .map(|row| row.iter().map(PiecewisePoly::primitive).collect())
            .collect();
        let model = ScalarModel { name: None, dim, flux, diffusion, primitive, urange };
        model.check_nonnegative()?;
        Ok(model)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Inviscid Burgers flux `u²/2` with zero diffusion.
    pub fn burgers(urange: (f64, f64)) -> Result<Self> {
        let (lo, hi) = urange;
        let flux = PiecewisePoly::polynomial(Poly::new(vec![0.0, 0.0, 0.5]), lo, hi)?;
        let zero = PiecewisePoly::constant(0.0, lo, hi)?;
        Ok(ScalarModel::new(vec![flux], vec![vec![zero]], urange)?.with_name("burgers"))
    }

    /// Linear transport `φ(u) = c u` with zero diffusion.
    pub fn linear(speed: f64, urange: (f64, f64)) -> Result<Self> {
        let (lo, hi) = urange;
        let flux = PiecewisePoly::polynomial(Poly::affine(0.0, speed), lo, hi)?;
        let zero = PiecewisePoly::constant(0.0, lo, hi)?;
        Ok(ScalarModel::new(vec![flux], vec![vec![zero]], urange)?.with_name("linear"))
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn urange(&self) -> (f64, f64) {
        self.urange
    }

    pub fn flux(&self) -> &[PiecewisePoly] {
        &self.flux
    }

    pub fn diffusion(&self) -> &[Vec<PiecewisePoly>] {
        &self.diffusion
    }

    /// The matrix `A` with `A' = a` and `A(0) = 0`.
    pub fn primitive(&self) -> &[Vec<PiecewisePoly>] {
        &self.primitive
    }

    pub fn is_diagonal(&self) -> bool {
        self.dim == 1 || (0..self.dim).all(|i| {
            (0..self.dim).all(|j| i == j || self.diffusion[i][j].pieces().iter().all(Poly::is_zero))
        })
    }

    pub fn flux_at(&self, u: f64) -> Vec<f64> {
        self.flux.iter().map(|f| f.eval(u)).collect()
    }

    pub fn diffusion_at(&self, u: f64) -> Vec<Vec<f64>> {
        self.diffusion
            .iter()
            .map(|row| row.iter().map(|a| a.eval(u)).collect())
            .collect()
    }

    pub fn primitive_at(&self, u: f64) -> Vec<Vec<f64>> {
        self.primitive
            .iter()
            .map(|row| row.iter().map(|a| a.eval(u)).collect())
            .collect()
    }

    pub fn contains(&self, u: f64) -> bool {
        u >= self.urange.0 && u <= self.urange.1
    }

    fn check_range(&self, what: &str, u: f64) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what}={u} outside urange [{}, {}]",
                self.urange.0, self.urange.1
            )))
        }
    }

    /// Sample points covering `urange`: a uniform grid plus every breakpoint inside.
    pub fn sample_points(&self, samples: usize) -> Vec<f64> {
        let (lo, hi) = self.urange;
        let mut pts: Vec<f64> = (0..=samples)
            .map(|k| lo + (hi - lo) * k as f64 / samples as f64)
            .collect();
        for f in self.flux.iter().chain(self.diffusion.iter().flatten()) {
            pts.extend(f.breakpoints().iter().copied().filter(|&b| b > lo && b < hi));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    fn check_nonnegative(&self) -> Result<()> {
        for u in self.sample_points(PSD_SAMPLES) {
            for m in [self.diffusion_at(u), self.diffusion_left_at(u)] {
                let ev = min_eigenvalue(&m);
                if ev < PSD_TOL {
                    return Err(Error::Config(format!(
                        "diffusion not nonnegative definite at u={u}: min eigenvalue {ev:e}"
                    )));
                }
            }
        }
        Ok(())
    }

    fn diffusion_left_at(&self, u: f64) -> Vec<Vec<f64>> {
        self.diffusion
            .iter()
            .map(|row| row.iter().map(|a| a.eval_left(u)).collect())
            .collect()
    }

    /// Maximum of `|φ_axis'|` over `[lo, hi]`.
    pub fn flux_slope_bound(&self, axis: usize, lo: f64, hi: f64, samples: usize) -> f64 {
        self.flux[axis].derivative().max_abs_on(lo, hi, samples)
    }

    /// Upper bound on the spectral radius of `a(u)` over `[lo, hi]`. Exact
    /// for diagonal matrices; sampled for full ones.
    pub fn diffusion_radius_bound(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        if self.is_diagonal() {
            (0..self.dim)
                .map(|i| self.diffusion[i][i].max_on(lo, hi, samples).max(0.0))
                .fold(0.0, f64::max)
        } else {
            let mut pts: Vec<f64> = (0..=samples)
                .map(|k| lo + (hi - lo) * k as f64 / samples as f64)
                .collect();
            for row in &self.diffusion {
                for a in row {
                    pts.extend(a.extremal_candidates(lo, hi, samples));
                }
            }
            pts.into_iter()
                .flat_map(|u| [self.diffusion_at(u), self.diffusion_left_at(u)])
                .map(|m| max_eigenvalue(&m))
                .fold(0.0, f64::max)
        }
    }

    /// Kruzhkov entropy flux `sgn(u-k)(φ(u)-φ(k))` and diffusion counterpart
    /// `sgn(u-k)(A(u)-A(k))`.
    pub fn kruzhkov_fluxes(&self, k: f64, u: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        self.check_range("k", k)?;
        self.check_range("u", u)?;
        let s = sign(u - k);
        let fu = self.flux_at(u);
        let fk = self.flux_at(k);
        let phi = fu.iter().zip(&fk).map(|(a, b)| s * (a - b)).collect();
        let au = self.primitive_at(u);
        let ak = self.primitive_at(k);
        let h = au
            .iter()
            .zip(&ak)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| s * (a - b)).collect())
            .collect();
        Ok((phi, h))
    }
}

/// Sign with `sign(0) = 0`.
pub fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Kruzhkov entropy flux, see [`ScalarModel::kruzhkov_fluxes`].
pub fn kruzhkov_fluxes(model: &ScalarModel, k: f64, u: f64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    model.kruzhkov_fluxes(k, u)
}

/// Smallest eigenvalue of a symmetric 1x1 or 2x2 matrix.
pub fn min_eigenvalue(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => {
            let (a, b, d) = (m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1]);
            0.5 * (a + d) - (0.25 * (a - d) * (a - d) + b * b).sqrt()
        }
        n => panic!("unsupported matrix size {n}"),
    }
}

/// Largest eigenvalue of a symmetric 1x1 or 2x2 matrix.
pub fn max_eigenvalue(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => {
            let (a, b, d) = (m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1]);
            0.5 * (a + d) + (0.25 * (a - d) * (a - d) + b * b).sqrt()
        }
        n => panic!("unsupported matrix size {n}"),
    }
}
