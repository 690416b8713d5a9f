//! Explicit monotone finite-volume scheme for
//! `u_t + div φ(u) - D²·A(u) = 0` in conservative form.
//!
//! Convective faces use the Lax-Friedrichs flux with one dissipation
//! coefficient per axis and step, `λ_i = max |φ_i'|` over the current value
//! range (or over a fixed `bound_range`). Unlike a face-local coefficient
//! this keeps the update nondecreasing in every argument under the CFL
//! bound. Diffusion uses centered differences of `A(u)`.

mod entropy;
mod export;

pub use entropy::{entropy_residual, smoothed_kruzhkov, Bump, EntropyTest};
pub use export::{write_trajectory, TrajectoryManifest};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Boundary, GridFunction};
use crate::model::{ModelFile, ScalarModel};

/// Boundary cells of a far-field run may deviate this much from the far
/// field before the box is declared too small.
pub const DOMAIN_GUARD_TOL: f64 = 1e-6;
/// Allowed excursion outside `urange` before a step is declared unstable.
pub const STABILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub cfl: f64,
    pub t_end: f64,
    #[serde(default)]
    pub snapshot_times: Vec<f64>,
    #[serde(default = "default_samples")]
    pub lipschitz_samples: usize,
    /// Fixed value range for the slope bounds. Runs that are compared cell
    /// by cell share it, so they take identical time steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound_range: Option<(f64, f64)>,
}

fn default_samples() -> usize {
    512
}

impl SolverConfig {
    pub fn new(cfl: f64, t_end: f64, snapshot_times: Vec<f64>) -> Self {
        SolverConfig { cfl, t_end, snapshot_times, lipschitz_samples: default_samples(), bound_range: None }
    }

    pub fn with_bound_range(mut self, lo: f64, hi: f64) -> Self {
        self.bound_range = Some((lo, hi));
        self
    }

    /// Snapshots at `t_end / count, 2 t_end / count, …, t_end`.
    pub fn uniform(cfl: f64, t_end: f64, count: usize) -> Self {
        let times = (1..=count).map(|k| t_end * k as f64 / count as f64).collect();
        SolverConfig::new(cfl, t_end, times)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.5) {
            return Err(Error::Config(format!("cfl must lie in (0, 0.5], got {}", self.cfl)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(Error::Config(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.lipschitz_samples < 256 {
            return Err(Error::Config("lipschitz_samples must be at least 256".into()));
        }
        if self.snapshot_times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("snapshot times must be strictly increasing".into()));
        }
        if self.snapshot_times.iter().any(|&t| !(0.0..=self.t_end).contains(&t)) {
            return Err(Error::Config("snapshot times must lie in [0, t_end]".into()));
        }
        if let Some((lo, hi)) = self.bound_range {
            if !(lo <= hi) {
                return Err(Error::Config(format!("empty bound range [{lo}, {hi}]")));
            }
        }
        Ok(())
    }

    /// Requested times with `t_end` appended when missing.
    pub fn output_times(&self) -> Vec<f64> {
        let mut t = self.snapshot_times.clone();
        if t.last() != Some(&self.t_end) {
            t.push(self.t_end);
        }
        t
    }
}

/// Value range seen by the scheme: the stored cells and the far field.
pub fn value_range(u: &GridFunction) -> (f64, f64) {
    let (mut lo, mut hi) = (u.min(), u.max());
    if let Some(f) = u.far_field() {
        lo = lo.min(f);
        hi = hi.max(f);
    }
    (lo, hi)
}

fn slope_range(u: &GridFunction, config: &SolverConfig) -> Result<(f64, f64)> {
    let (lo, hi) = value_range(u);
    if !(lo <= hi) {
        return Err(Error::Shape("empty value range".into()));
    }
    match config.bound_range {
        None => Ok((lo, hi)),
        Some((blo, bhi)) => {
            if lo < blo - STABILITY_TOL || hi > bhi + STABILITY_TOL {
                return Err(Error::Config(format!(
                    "values [{lo}, {hi}] leave the bound range [{blo}, {bhi}]"
                )));
            }
            Ok((blo, bhi))
        }
    }
}

/// Per-axis dissipation coefficients `λ_i`.
fn slopes(u: &GridFunction, model: &ScalarModel, config: &SolverConfig) -> Result<Vec<f64>> {
    let (lo, hi) = slope_range(u, config)?;
    Ok((0..model.dim())
        .map(|axis| model.flux_slope_bound(axis, lo, hi, config.lipschitz_samples))
        .collect())
}

/// Stable step `cfl · min(dx / Σλ_i, dx² / (2·dim·L_a))`; `t_end` when the
/// model is constant on the value range.
pub fn cfl_dt(u: &GridFunction, model: &ScalarModel, config: &SolverConfig) -> Result<f64> {
    let (lo, hi) = slope_range(u, config)?;
    let dx = u.cell_size();
    let l_phi: f64 = slopes(u, model, config)?.iter().sum();
    let l_a = model.diffusion_radius_bound(lo, hi, config.lipschitz_samples);
    let hyper = if l_phi > 0.0 { dx / l_phi } else { f64::INFINITY };
    let parab = if l_a > 0.0 { dx * dx / (2.0 * model.dim() as f64 * l_a) } else { f64::INFINITY };
    let bound = hyper.min(parab);
    Ok(if bound.is_finite() { config.cfl * bound } else { config.t_end })
}

/// Stored cells plus one ghost layer per side (x always, y in 2D).
struct Padded {
    w: usize,
    oy: usize,
    data: Vec<f64>,
}

impl Padded {
    fn new(u: &GridFunction) -> Self {
        let w = u.nx() + 2;
        let oy = usize::from(u.dim() == 2);
        let h = u.ny() + 2 * oy;
        let mut data = Vec::with_capacity(w * h);
        for jp in 0..h {
            for ip in 0..w {
                data.push(u.value_at(ip as isize - 1, jp as isize - oy as isize));
            }
        }
        Padded { w, oy, data }
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        self.data.iter().map(|&v| f(v)).collect()
    }
}

/// One forward-Euler step of size `dt`.
pub fn step(u: &GridFunction, model: &ScalarModel, dt: f64, lambda: &[f64]) -> Result<GridFunction> {
    if u.dim() != model.dim() {
        return Err(Error::Shape(format!("grid is {}D but model is {}D", u.dim(), model.dim())));
    }
    let dim = u.dim();
    let dx = u.cell_size();
    let pad = Padded::new(u);
    let (w, oy) = (pad.w, pad.oy);
    let (nx, ny) = (u.nx(), u.ny());
    let uu = &pad.data;
    let phi: Vec<Vec<f64>> = (0..dim).map(|a| pad.map(|v| model.flux()[a].eval(v))).collect();
    let prim = model.primitive();
    let aa: Vec<Vec<f64>> = (0..dim).map(|a| pad.map(|v| prim[a][a].eval(v))).collect();
    let cross = (dim == 2 && !model.is_diagonal()).then(|| pad.map(|v| prim[0][1].eval(v)));

    // total face flux between padded cells c and c + stride
    let face = |axis: usize, c: usize, stride: usize| {
        let d = c + stride;
        0.5 * (phi[axis][c] + phi[axis][d]) - 0.5 * lambda[axis] * (uu[d] - uu[c])
            - (aa[axis][d] - aa[axis][c]) / dx
    };

    let r = dt / dx;
    let mut out = Vec::with_capacity(nx * ny);
    // x faces of one row are reused by both neighbours
    let mut gx = vec![0.0; nx + 1];
    for j in 0..ny {
        let row = (j + oy) * w;
        for (i, g) in gx.iter_mut().enumerate() {
            *g = face(0, row + i, 1);
        }
        for i in 0..nx {
            let c = row + i + 1;
            let mut v = uu[c] - r * (gx[i + 1] - gx[i]);
            if dim == 2 {
                v -= r * (face(1, c, w) - face(1, c - w, w));
                if let Some(a01) = &cross {
                    // 2 ∂x∂y A_01
                    let mixed = a01[c + w + 1] - a01[c - w + 1] - a01[c + w - 1] + a01[c - w - 1];
                    v += dt * mixed / (2.0 * dx * dx);
                }
            }
            out.push(v);
        }
    }
    u.with_values(out)
}

/// Solution snapshots and step history of one run.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub model: ScalarModel,
    pub model_hash: String,
    pub config: Option<SolverConfig>,
    pub initial: GridFunction,
    pub snapshots: Vec<(f64, GridFunction)>,
    pub steps: Vec<f64>,
    /// False for cross-diffusion runs, whose scheme is not monotone; their
    /// discrete principles are diagnostic only.
    pub monotone: bool,
}

impl Trajectory {
    /// Assemble a trajectory from externally produced states.
    pub fn from_snapshots(
        model: &ScalarModel,
        initial: GridFunction,
        snapshots: Vec<(f64, GridFunction)>,
    ) -> Result<Self> {
        let mut prev = 0.0;
        for (t, g) in &snapshots {
            if !(*t > prev) && !(prev == 0.0 && *t == 0.0) {
                return Err(Error::Config("snapshot times must be strictly increasing".into()));
            }
            initial.require_same_geometry(g)?;
            prev = *t;
        }
        Ok(Trajectory {
            model: model.clone(),
            model_hash: ModelFile::from_model(model).hash(),
            config: None,
            initial,
            snapshots,
            steps: Vec::new(),
            monotone: model.is_diagonal(),
        })
    }

    pub fn times(&self) -> Vec<f64> {
        self.snapshots.iter().map(|s| s.0).collect()
    }

    pub fn last(&self) -> &GridFunction {
        self.snapshots.last().map_or(&self.initial, |s| &s.1)
    }

    /// Snapshot at exactly `t`, or the initial state for `t = 0`.
    pub fn at(&self, t: f64) -> Option<&GridFunction> {
        if t == 0.0 {
            return Some(&self.initial);
        }
        self.snapshots.iter().find(|s| s.0 == t).map(|s| &s.1)
    }

    /// `(0, initial)` followed by every snapshot after time zero.
    pub fn states(&self) -> Vec<(f64, &GridFunction)> {
        let mut v = vec![(0.0, &self.initial)];
        v.extend(self.snapshots.iter().filter(|s| s.0 > 0.0).map(|s| (s.0, &s.1)));
        v
    }
}

fn check_range(u: &GridFunction, model: &ScalarModel, t: f64) -> Result<()> {
    let (lo, hi) = model.urange();
    let (vlo, vhi) = value_range(u);
    let bad = if vlo < lo - STABILITY_TOL { Some(vlo) } else if vhi > hi + STABILITY_TOL { Some(vhi) } else { None };
    match bad {
        Some(value) => Err(Error::Stability { time: t, value, lo, hi }),
        None => Ok(()),
    }
}

fn check_boundary(u: &GridFunction, t: f64) -> Result<()> {
    let Some(f) = u.far_field() else { return Ok(()) };
    let (nx, ny) = (u.nx(), u.ny());
    let mut worst: f64 = 0.0;
    for j in 0..ny {
        worst = worst.max((u.get(0, j) - f).abs()).max((u.get(nx - 1, j) - f).abs());
    }
    if u.dim() == 2 {
        for i in 0..nx {
            worst = worst.max((u.get(i, 0) - f).abs()).max((u.get(i, ny - 1) - f).abs());
        }
    }
    if worst > DOMAIN_GUARD_TOL {
        return Err(Error::DomainTooSmall { time: t, deviation: worst, limit: DOMAIN_GUARD_TOL });
    }
    Ok(())
}

pub fn solve(u0: &GridFunction, model: &ScalarModel, config: &SolverConfig) -> Result<Trajectory> {
    config.validate()?;
    if u0.dim() != model.dim() {
        return Err(Error::Shape(format!("grid is {}D but model is {}D", u0.dim(), model.dim())));
    }
    let (lo, hi) = model.urange();
    let (vlo, vhi) = value_range(u0);
    if vlo < lo || vhi > hi {
        return Err(Error::Domain(format!("initial values [{vlo}, {vhi}] outside urange [{lo}, {hi}]")));
    }
    check_boundary(u0, 0.0)?;

    let mut u = u0.clone();
    let mut t = 0.0;
    let mut snapshots = Vec::new();
    let mut steps = Vec::new();
    for target in config.output_times() {
        while t < target {
            let mut dt = cfl_dt(&u, model, config)?;
            let lambda = slopes(&u, model, config)?;
            let last = t + dt >= target;
            if last {
                dt = target - t;
            }
            u = step(&u, model, dt, &lambda)?;
            t = if last { target } else { t + dt };
            steps.push(dt);
            check_range(&u, model, t)?;
            check_boundary(&u, t)?;
        }
        snapshots.push((target, u.clone()));
    }
    Ok(Trajectory {
        model: model.clone(),
        model_hash: ModelFile::from_model(model).hash(),
        config: Some(config.clone()),
        initial: u0.clone(),
        snapshots,
        steps,
        monotone: model.is_diagonal(),
    })
}

/// Solutions for the truncated data `u0` on `|x| ≤ radius_r`, `b_r` outside.
///
/// A strictly decreasing `b_list` above `ess sup u0` approximates the
/// maximal solution, a strictly increasing one below `ess inf u0` the
/// minimal one. All runs share one slope range so their time steps
/// coincide, which makes the monotonicity of the scheme visible cell by
/// cell.
pub fn truncation_sequence(
    u0: &GridFunction,
    model: &ScalarModel,
    config: &SolverConfig,
    b_list: &[f64],
    radius_list: &[f64],
) -> Result<Vec<Trajectory>> {
    if b_list.is_empty() || b_list.len() != radius_list.len() {
        return Err(Error::Config("b_list and radius_list must be nonempty and of equal length".into()));
    }
    let from_below = b_list.len() > 1 && b_list.windows(2).all(|w| w[0] < w[1]);
    if !from_below && b_list.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Config("b_list must be strictly monotone".into()));
    }
    if radius_list.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("radius_list must be increasing".into()));
    }
    let (vlo, vhi) = value_range(u0);
    if from_below {
        if let Some(&b) = b_list.iter().find(|&&b| b > vlo) {
            return Err(Error::Config(format!("b={b} is above ess inf u0 = {vlo}")));
        }
    } else if let Some(&b) = b_list.iter().find(|&&b| b < vhi) {
        return Err(Error::Config(format!("b={b} is below ess sup u0 = {vhi}")));
    }
    let r_max = radius_list[radius_list.len() - 1];
    for (lo, hi) in u0.extent() {
        if -r_max < lo || r_max > hi {
            return Err(Error::Config(format!("radius {r_max} leaves the domain [{lo}, {hi}]")));
        }
    }
    let mut cfg = config.clone();
    if cfg.bound_range.is_none() {
        cfg.bound_range = Some(if from_below { (b_list[0], vhi) } else { (vlo, b_list[0]) });
    }
    b_list
        .iter()
        .zip(radius_list)
        .map(|(&b, &radius)| {
            let mut values = Vec::with_capacity(u0.len());
            for j in 0..u0.ny() {
                for i in 0..u0.nx() {
                    let c = u0.center(i, j);
                    let inside = c[0] * c[0] + c[1] * c[1] <= radius * radius;
                    values.push(if inside { u0.get(i, j) } else { b });
                }
            }
            let start = u0.with_values(values)?.with_bc(Boundary::FarField(b))?;
            solve(&start, model, &cfg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{PiecewisePoly, Poly};

    fn heat(urange: (f64, f64)) -> ScalarModel {
        let zero = PiecewisePoly::polynomial(Poly::zero(), urange.0, urange.1).unwrap();
        let one = PiecewisePoly::polynomial(Poly::constant(1.0), urange.0, urange.1).unwrap();
        ScalarModel::new(vec![zero], vec![vec![one]], urange).unwrap()
    }

    fn viscous_burgers() -> ScalarModel {
        let f = PiecewisePoly::polynomial(Poly::new(vec![0.0, 0.0, 0.5]), -1.0, 1.0).unwrap();
        let one = PiecewisePoly::polynomial(Poly::constant(1.0), -1.0, 1.0).unwrap();
        ScalarModel::new(vec![f], vec![vec![one]], (-1.0, 1.0)).unwrap()
    }

    #[test]
    fn cfl_examples() {
        let cfg = SolverConfig::new(0.45, 1.0, vec![]);
        let u = GridFunction::sample(1, &[0.0], 0.01, &[100], Boundary::Periodic, 1, |x| x[0]).unwrap();
        // values span (0, 1): use the exact range [0, 1]
        let cfg01 = cfg.clone().with_bound_range(0.0, 1.0);
        let burgers = ScalarModel::burgers((-1.0, 1.0)).unwrap();
        assert!((cfl_dt(&u, &burgers, &cfg01).unwrap() - 0.0045).abs() < 1e-15);
        assert!((cfl_dt(&u, &heat((-1.0, 1.0)), &cfg01).unwrap() - 2.25e-5).abs() < 1e-18);
        assert!((cfl_dt(&u, &viscous_burgers(), &cfg01).unwrap() - 2.25e-5).abs() < 1e-18);
        let flat = ScalarModel::linear(0.0, (-1.0, 1.0)).unwrap();
        assert_eq!(cfl_dt(&u, &flat, &cfg).unwrap(), 1.0);
    }

    #[test]
    fn constant_state_is_exact() {
        let u = GridFunction::new(1, &[0.0], 0.1, &[10], vec![0.3; 10], Boundary::Periodic).unwrap();
        let t = solve(&u, &viscous_burgers(), &SolverConfig::uniform(0.45, 0.5, 5)).unwrap();
        for (_, g) in &t.snapshots {
            assert!(g.values().iter().all(|&v| v == 0.3));
        }
        assert_eq!(t.times(), vec![0.1, 0.2, 0.3, 0.4, 0.5]);
    }

    #[test]
    fn riemann_front_speed() {
        // periodic box: the jump at x = 0 is the shock, the wrap-around one a fan
        let u0 = GridFunction::sample(1, &[-2.0], 0.005, &[800], Boundary::Periodic, 1, |x| {
            if x[0] < 0.0 { 1.0 } else { 0.0 }
        })
        .unwrap();
        let burgers = ScalarModel::burgers((-1.0, 1.0)).unwrap();
        let t = solve(&u0, &burgers, &SolverConfig::new(0.45, 1.0, vec![])).unwrap();
        let g = t.last();
        let front = (0..g.nx()).find(|&i| g.center(i, 0)[0] > -0.9 && g.get(i, 0) < 0.5).unwrap();
        assert!((g.center(front, 0)[0] - 0.5).abs() <= 3.0 * 0.005);
    }

    #[test]
    fn heat_conserves_mass_and_decreases_max() {
        let u0 = GridFunction::sample(1, &[0.0], 0.02, &[50], Boundary::Periodic, 4, |x| {
            (2.0 * std::f64::consts::PI * x[0]).sin().max(0.0)
        })
        .unwrap();
        let model = heat((-1.0, 1.0));
        let t = solve(&u0, &model, &SolverConfig::uniform(0.45, 0.05, 10)).unwrap();
        let mut prev = u0.max();
        for (_, g) in &t.snapshots {
            assert!((g.mass() - u0.mass()).abs() < 1e-12);
            assert!(g.max() <= prev);
            prev = g.max();
        }
    }

    #[test]
    fn unstable_range_and_small_domain_are_reported() {
        let burgers = ScalarModel::burgers((-1.0, 1.0)).unwrap();
        let u0 = GridFunction::sample(1, &[-1.0], 0.01, &[200], Boundary::FarField(0.0), 1, |x| {
            if x[0].abs() < 0.5 { 1.0 } else { 0.0 }
        })
        .unwrap();
        assert!(matches!(
            solve(&u0, &burgers, &SolverConfig::new(0.45, 2.0, vec![])),
            Err(Error::DomainTooSmall { .. })
        ));
        let out = GridFunction::new(1, &[0.0], 0.1, &[3], vec![2.0; 3], Boundary::Periodic).unwrap();
        assert!(matches!(solve(&out, &burgers, &SolverConfig::new(0.45, 1.0, vec![])), Err(Error::Domain(_))));
        // a forged oversized step leaves urange
        let u = GridFunction::new(1, &[0.0], 0.1, &[4], vec![1.0, -1.0, 1.0, -1.0], Boundary::Periodic).unwrap();
        let bad = step(&u, &heat((-1.0, 1.0)), 1.0, &[0.0]).unwrap();
        assert!(check_range(&bad, &heat((-1.0, 1.0)), 1.0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(0.6, 1.0, vec![]).validate().is_err());
        assert!(SolverConfig::new(0.4, 1.0, vec![0.5, 0.2]).validate().is_err());
        assert!(SolverConfig::new(0.4, 1.0, vec![1.5]).validate().is_err());
        assert_eq!(SolverConfig::new(0.4, 1.0, vec![0.5]).output_times(), vec![0.5, 1.0]);
    }

    #[test]
    fn truncation_examples() {
        let burgers = ScalarModel::burgers((-1.0, 1.0)).unwrap();
        let u0 = GridFunction::sample(1, &[-4.0], 0.05, &[160], Boundary::FarField(0.0), 1, |x| {
            0.2 * (1.0 - x[0] * x[0]).max(0.0)
        })
        .unwrap();
        let cfg = SolverConfig::new(0.45, 0.1, vec![]);
        let tr = truncation_sequence(&u0, &burgers, &cfg, &[0.2], &[2.0]).unwrap();
        let start = &tr[0].initial;
        for k in 0..u0.len() {
            assert!(start.values()[k] >= u0.values()[k]);
            if u0.center(k, 0)[0].abs() <= 2.0 {
                assert_eq!(start.values()[k], u0.values()[k]);
            }
        }
        assert!(truncation_sequence(&u0, &burgers, &cfg, &[0.3, 0.4], &[1.0, 2.0]).is_err());
        assert!(truncation_sequence(&u0, &burgers, &cfg, &[0.1], &[1.0]).is_err());
        let below = truncation_sequence(&u0, &burgers, &cfg, &[-0.3, -0.2], &[1.0, 2.0]).unwrap();
        assert!(below[0].last().min() >= -0.3 - 1e-12);
        assert!(truncation_sequence(&u0, &burgers, &cfg, &[-0.1, 0.05], &[1.0, 2.0]).is_err());
    }
}
