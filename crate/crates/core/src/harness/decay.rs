//! Decay of periodic and whole-space solutions, and the sandwich between
//! mean-shifted lattice periodizations.

use crate::error::{Error, Result};
use crate::grid::{periodize_inf, periodize_sup, shift_mean, x_norm, Boundary, GridFunction, LatticeSpec};
use crate::model::{check_gn, nearest_f_values, thm_hypothesis_periodic, GnReport, HypothesisReport, PiecewisePoly, ScalarModel};
use crate::solver::{solve, value_range, SolverConfig, Trajectory};

use super::{DecaySeries, PropertyReport, ReportSet};

/// Window radius of the decaying norm.
const WINDOW: f64 = 1.0;
const MONOTONE_TOL: f64 = 1e-10;
const SANDWICH_TOL: f64 = 1e-10;

pub struct DecayOutcome {
    pub trajectory: Trajectory,
    pub series: DecaySeries,
    pub reports: ReportSet,
    pub hypothesis: Option<HypothesisReport>,
}

fn box_matches_lattice(u0: &GridFunction, lattice: &LatticeSpec) -> bool {
    let ext = u0.extent();
    lattice.dim() == u0.dim()
        && lattice.basis().iter().enumerate().all(|(i, row)| {
            row.iter().enumerate().all(|(j, &v)| {
                let want = if i == j { ext[i].1 - ext[i].0 } else { 0.0 };
                (v - want).abs() <= 1e-9 * (ext[i].1 - ext[i].0)
            })
        })
}

/// Decay of `(1/|T|) ∫_T |u - I|` on the torus `T = R^n / L`, where `I` is
/// the mean of the data and `L` must be the lattice of the grid box.
pub fn run_periodic_decay(
    u0: &GridFunction,
    model: &ScalarModel,
    lattice: &LatticeSpec,
    config: &SolverConfig,
    fraction: f64,
    xi_bound: i64,
) -> Result<DecayOutcome> {
    if u0.bc() != Boundary::Periodic {
        return Err(Error::Config("periodic decay needs periodic data".into()));
    }
    if !box_matches_lattice(u0, lattice) {
        return Err(Error::Config("the grid box must be a fundamental cell of the lattice".into()));
    }
    let mean = u0.mean();
    let hypothesis = thm_hypothesis_periodic(model, lattice, mean, xi_bound)?;
    let trajectory = solve(u0, model, config)?;

    let mut series = DecaySeries::default();
    for (t, u) in trajectory.states() {
        series.push(t, x_norm(u, WINDOW)?, u.mean_abs_deviation(mean), u.min(), u.max());
    }
    let mut reports = ReportSet::default();
    if !hypothesis.holds {
        reports.notes.push(format!(
            "hypothesis unverified: {} degenerate dual vector(s) near the mean {mean}",
            hypothesis.witnesses.len()
        ));
    }
    let l = &series.l1_norm;
    let level = fraction * l[0];
    let mut rep = PropertyReport::new("decay_below_fraction", level - l[l.len() - 1], 0.0)
        .with_ref("mean", mean)
        .with_ref("fraction", fraction)
        .with_ref("hypothesis_holds", hypothesis.holds);
    if let Some(tc) = series.crossing_time(l, level) {
        rep = rep.with_ref("crossing_time", tc);
    }
    reports.push(rep);
    let slack = l.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    reports.push(PropertyReport::new("distance_to_mean_nonincreasing", slack, MONOTONE_TOL));
    Ok(DecayOutcome { trajectory, series, reports, hypothesis: Some(hypothesis) })
}

/// Interval reached from `support` by characteristics with speeds in
/// `φ'([lo, hi])` before `horizon`, widened by `margin` on both sides.
pub fn influence_interval(
    model: &ScalarModel,
    support: (f64, f64),
    values: (f64, f64),
    horizon: f64,
    margin: f64,
) -> (f64, f64) {
    let d = model.flux()[0].derivative();
    let neg = PiecewisePoly::linear_combination(&[&d], &[-1.0]);
    let (lo, hi) = values;
    let fastest_right = d.max_on(lo, hi, 512).max(0.0);
    let fastest_left = neg.max_on(lo, hi, 512).max(0.0);
    (support.0 - fastest_left * horizon - margin, support.1 + fastest_right * horizon + margin)
}

/// Window-norm decay for far-field data with zero far field.
pub fn run_whole_space_decay(
    u0: &GridFunction,
    model: &ScalarModel,
    config: &SolverConfig,
    fraction: f64,
) -> Result<DecayOutcome> {
    if u0.far_field() != Some(0.0) {
        return Err(Error::Config("whole-space decay needs far field 0".into()));
    }
    let trajectory = solve(u0, model, config)?;
    let mut series = DecaySeries::default();
    for (t, u) in trajectory.states() {
        series.push(t, x_norm(u, WINDOW)?, u.l1_norm(), u.min(), u.max());
    }
    let x = &series.x_norm;
    let level = fraction * x[0];
    let mut reports = ReportSet::default();
    let mut rep = PropertyReport::new("x_norm_below_fraction", level - x[x.len() - 1], 0.0)
        .with_ref("fraction", fraction)
        .with_ref("x_norm0", x[0])
        .with_ref("x_norm_end", x[x.len() - 1]);
    if let Some(tc) = series.crossing_time(x, level) {
        rep = rep.with_ref("crossing_time", tc);
    }
    reports.push(rep);
    let peak = DecaySeries::majorant(x)[0];
    reports.push(PropertyReport::new("majorant_starts_at_initial", x[0] - peak, MONOTONE_TOL * x[0].max(1.0)));
    Ok(DecayOutcome { trajectory, series, reports, hypothesis: None })
}

pub struct SandwichOutcome {
    /// Scale after snapping the period box to whole cells.
    pub r: f64,
    pub gn: GnReport,
    pub m_minus: f64,
    pub m_plus: f64,
    pub b_minus: f64,
    pub b_plus: f64,
    /// Discrete measure of the unit window.
    pub window_measure: f64,
    pub lower: Trajectory,
    pub upper: Trajectory,
    pub middle: Trajectory,
    /// Window norm of `u` with the majorant in `bound_rhs`.
    pub series: DecaySeries,
    /// `u^- - B^-` and `u^+ - B^+` on their tori.
    pub series_lower: DecaySeries,
    pub series_upper: DecaySeries,
    pub reports: ReportSet,
}

/// Extend far-field data by far-field cells on the high side so that each
/// axis holds a whole number of periods.
fn pad_to_multiple(u0: &GridFunction, period: &[usize]) -> Result<GridFunction> {
    let f = u0.far_field().unwrap_or(0.0);
    let shape: Vec<usize> = (0..u0.dim()).map(|a| u0.shape()[a].div_ceil(period[a]) * period[a]).collect();
    let (nx, ny) = (shape[0], if u0.dim() == 2 { shape[1] } else { 1 });
    let mut values = vec![f; nx * ny];
    for j in 0..u0.ny() {
        for i in 0..u0.nx() {
            values[j * nx + i] = u0.get(i, j);
        }
    }
    GridFunction::new(u0.dim(), u0.origin(), u0.cell_size(), &shape, values, u0.bc())
}

/// Solves from `u0` and from the mean-shifted periodizations
/// `v^± - M^± + B^±`, with `B^±` the nearest points of the nondegeneracy
/// set, and checks the ordering `u^- ≤ u ≤ u^+` and the resulting bound on
/// the window norm of `u`.
pub fn run_sandwich_decay(
    u0: &GridFunction,
    model: &ScalarModel,
    lattice: &LatticeSpec,
    r: f64,
    config: &SolverConfig,
) -> Result<SandwichOutcome> {
    if u0.far_field() != Some(0.0) {
        return Err(Error::Config("sandwich needs far-field data with far field 0".into()));
    }
    let gn = check_gn(model);
    if !gn.holds {
        return Err(Error::Analysis(format!(
            "nondegeneracy condition fails{}",
            gn.witness.map_or(String::new(), |(a, b)| format!(" on [{a}, {b}]"))
        )));
    }
    let sup = periodize_sup(u0, lattice, r)?;
    let inf = periodize_inf(u0, lattice, r)?;
    let (m_minus, m_plus) = (inf.grid.mean(), sup.grid.mean());
    let (b_minus, b_plus) = nearest_f_values(&gn, m_minus, m_plus)?;
    let lower0 = shift_mean(&inf.grid, b_minus)?;
    let upper0 = shift_mean(&sup.grid, b_plus)?;
    let u0 = pad_to_multiple(u0, sup.grid.shape())?;

    let mut cfg = config.clone();
    if cfg.bound_range.is_none() {
        let (ulo, uhi) = value_range(&u0);
        cfg.bound_range = Some((lower0.min().min(ulo), upper0.max().max(uhi)));
    }
    let middle = solve(&u0, model, &cfg)?;
    let lower = solve(&lower0, model, &cfg)?;
    let upper = solve(&upper0, model, &cfg)?;
    let window_measure = x_norm(&lower0.constant_like(1.0), WINDOW)?;

    let mut series = DecaySeries { bound_rhs: Some(Vec::new()), ..Default::default() };
    let mut series_lower = DecaySeries::default();
    let mut series_upper = DecaySeries::default();
    let mut order = (f64::INFINITY, 0.0);
    let mut l6 = (f64::INFINITY, 0.0);
    let mut initial_order = f64::INFINITY;
    let states = middle.states().into_iter().zip(upper.states()).zip(lower.states());
    for (((t, u), (_, up)), (_, lo)) in states {
        let up_t = up.tile_periodic(u.origin(), u.shape())?;
        let lo_t = lo.tile_periodic(u.origin(), u.shape())?;
        let gap = u
            .values()
            .iter()
            .zip(up_t.values().iter().zip(lo_t.values()))
            .map(|(v, (p, m))| (p - v).min(v - m))
            .fold(f64::INFINITY, f64::min);
        if t == 0.0 {
            initial_order = gap;
        }
        if gap < order.0 {
            order = (gap, t);
        }
        let xl = x_norm(&lo.map(|v| v - b_minus)?, WINDOW)?;
        let xu = x_norm(&up.map(|v| v - b_plus)?, WINDOW)?;
        let xm = x_norm(u, WINDOW)?;
        let rhs = xl + xu + window_measure * (b_minus.abs() + b_plus.abs());
        if rhs - xm < l6.0 {
            l6 = (rhs - xm, t);
        }
        series.push(t, xm, u.l1_norm(), u.min(), u.max());
        series.bound_rhs.as_mut().expect("set above").push(rhs);
        series_lower.push(t, xl, lo.mean_abs_deviation(b_minus), lo.min(), lo.max());
        series_upper.push(t, xu, up.mean_abs_deviation(b_plus), up.min(), up.max());
    }

    let mut reports = ReportSet::default();
    reports.push(PropertyReport::new("initial_order", initial_order, 1e-12));
    reports.push(PropertyReport::new("sandwich", order.0, SANDWICH_TOL).with_ref("t_worst", order.1));
    reports.push(
        PropertyReport::new("window_bound", l6.0, SANDWICH_TOL)
            .with_ref("t_worst", l6.1)
            .with_ref("r", sup.r)
            .with_ref("b_minus", b_minus)
            .with_ref("b_plus", b_plus),
    );
    Ok(SandwichOutcome {
        r: sup.r,
        gn,
        m_minus,
        m_plus,
        b_minus,
        b_plus,
        window_measure,
        lower,
        upper,
        middle,
        series,
        series_lower,
        series_upper,
        reports,
    })
}
