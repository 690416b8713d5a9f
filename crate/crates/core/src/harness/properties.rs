//! Discrete maximum principle, conservation, comparison and contraction.

use crate::error::{Error, Result};
use crate::grid::{l1_plus, l1_plus_const, Boundary, GridFunction};
use crate::model::ScalarModel;
use crate::solver::{solve, truncation_sequence, value_range, SolverConfig, Trajectory};

use super::{PropertyReport, ReportSet};

/// Second level of the one-sided bound, above the far field.
pub const K_PLUS_OFFSET: f64 = 0.1;
const MAX_TOL: f64 = 1e-12;
const CONSERVATION_TOL_PER_STEP: f64 = 1e-12;
const CONTRACTION_TOL: f64 = 1e-10;
const COMPARISON_TOL: f64 = 1e-12;
const MONOTONE_TOL: f64 = 1e-10;

fn diagnostic_note(traj: &Trajectory, notes: &mut Vec<String>) {
    if !traj.monotone {
        notes.push("cross-diffusion run: the scheme is not monotone, discrete principles are diagnostic only".into());
    }
}

/// Single-run checks: bounds by the initial range, mass conservation on a
/// torus, and `∫(u - k)⁺` nonincreasing for `k = b` and `k = b + 0.1` on a
/// far-field run with far field `b`.
pub fn check_properties(traj: &Trajectory) -> ReportSet {
    let mut set = ReportSet::default();
    diagnostic_note(traj, &mut set.notes);
    let states = traj.states();
    let (lo0, hi0) = value_range(&traj.initial);

    let mut worst = (f64::INFINITY, 0.0);
    for (t, u) in &states {
        let (lo, hi) = value_range(u);
        let s = (lo - lo0).min(hi0 - hi);
        if s < worst.0 {
            worst = (s, *t);
        }
    }
    set.push(PropertyReport::new("max_principle", worst.0, MAX_TOL).with_ref("t_worst", worst.1));

    match traj.initial.bc() {
        Boundary::Periodic => {
            let m0 = traj.initial.mass();
            let drift = states.iter().map(|(_, u)| (u.mass() - m0).abs()).fold(0.0, f64::max);
            let tol = CONSERVATION_TOL_PER_STEP * traj.steps.len().max(1) as f64 * traj.initial.l1_norm().max(1.0);
            set.push(PropertyReport::new("conservation", -drift, tol).with_ref("mass0", m0));
        }
        Boundary::FarField(b) => {
            for (name, k) in [("k_plus_far_field", b), ("k_plus_above_far_field", b + K_PLUS_OFFSET)] {
                let base = l1_plus_const(&traj.initial, k);
                let mut worst = (f64::INFINITY, 0.0);
                for (t, u) in &states {
                    let s = base - l1_plus_const(u, k);
                    if s < worst.0 {
                        worst = (s, *t);
                    }
                }
                set.push(
                    PropertyReport::new(name, worst.0, CONTRACTION_TOL).with_ref("k", k).with_ref("t_worst", worst.1),
                );
            }
        }
    }
    set
}

fn far_field_ok(a: &GridFunction, b: &GridFunction, cmp: impl Fn(f64, f64) -> bool) -> bool {
    match (a.far_field(), b.far_field()) {
        (Some(x), Some(y)) => cmp(x, y),
        (None, None) => true,
        _ => false,
    }
}

fn ordered(a: &GridFunction, b: &GridFunction) -> bool {
    far_field_ok(a, b, |x, y| x <= y) && a.values().iter().zip(b.values()).all(|(x, y)| x <= y)
}

/// Two runs on one grid with identical time steps: one-sided `L¹`
/// contraction, and comparison when the data are ordered.
pub fn check_pair(u: &Trajectory, v: &Trajectory) -> Result<ReportSet> {
    u.initial.require_same_geometry(&v.initial)?;
    if u.times() != v.times() || u.steps != v.steps {
        return Err(Error::Config("paired runs must share snapshot times and time steps".into()));
    }
    if u.initial.bc() != v.initial.bc() && !matches!((u.initial.bc(), v.initial.bc()), (Boundary::FarField(_), Boundary::FarField(_))) {
        return Err(Error::Config("paired runs mix periodic and far-field data".into()));
    }
    let mut set = ReportSet::default();
    diagnostic_note(u, &mut set.notes);
    let us = u.states();
    let vs = v.states();

    if far_field_ok(&u.initial, &v.initial, |x, y| x == y) {
        let mut worst = (f64::INFINITY, 0.0);
        for k in 1..us.len() {
            let (u0, v0, u1, v1) = (us[k - 1].1, vs[k - 1].1, us[k].1, vs[k].1);
            for (a0, b0, a1, b1) in [(u0, v0, u1, v1), (v0, u0, v1, u1)] {
                let s = l1_plus(a0, b0)? - l1_plus(a1, b1)?;
                if s < worst.0 {
                    worst = (s, us[k].0);
                }
            }
        }
        set.push(PropertyReport::new("l1_contraction", worst.0, CONTRACTION_TOL).with_ref("t_worst", worst.1));
    } else {
        set.notes.push("far fields differ: L1 contraction is not checked on a truncated box".into());
    }

    let pair = if ordered(&u.initial, &v.initial) {
        Some((&us, &vs))
    } else if ordered(&v.initial, &u.initial) {
        Some((&vs, &us))
    } else {
        None
    };
    match pair {
        Some((lo, hi)) => {
            let mut worst = (f64::INFINITY, 0.0);
            for k in 0..lo.len() {
                let s = lo[k].1.values().iter().zip(hi[k].1.values()).map(|(a, b)| b - a).fold(f64::INFINITY, f64::min);
                if s < worst.0 {
                    worst = (s, lo[k].0);
                }
            }
            set.push(PropertyReport::new("comparison", worst.0, COMPARISON_TOL).with_ref("t_worst", worst.1));
        }
        None => set.notes.push("initial data are not ordered: comparison not applicable".into()),
    }
    Ok(set)
}

/// Runs from truncations with monotone outer levels `b_r` and growing
/// radii: pointwise monotone in `r` at every snapshot (nonincreasing when
/// the levels decrease), and successive
/// differences on `|x|_∞ ≤ inner` at the final time shrinking at least by
/// half.
pub fn check_extremal_convergence(trajs: &[Trajectory], inner: f64) -> Result<ReportSet> {
    if trajs.len() < 3 {
        return Err(Error::Config("extremal convergence needs at least three runs".into()));
    }
    for w in trajs.windows(2) {
        w[0].initial.require_same_geometry(&w[1].initial)?;
        if w[0].times() != w[1].times() {
            return Err(Error::Config("runs must share snapshot times".into()));
        }
    }
    // far fields rising with r mean the sequence approaches from below
    let far = |k: usize| trajs[k].initial.far_field().unwrap_or(0.0);
    let sign = if far(1) > far(0) { -1.0 } else { 1.0 };
    let mut set = ReportSet::default();
    let mut worst = (f64::INFINITY, 0.0, 0);
    for (r, w) in trajs.windows(2).enumerate() {
        for ((t, a), (_, b)) in w[0].states().into_iter().zip(w[1].states()) {
            let s = a.values().iter().zip(b.values()).map(|(x, y)| sign * (x - y)).fold(f64::INFINITY, f64::min);
            if s < worst.0 {
                worst = (s, t, r);
            }
        }
    }
    set.push(
        PropertyReport::new("monotone_in_r", worst.0, MONOTONE_TOL)
            .with_ref("t_worst", worst.1)
            .with_ref("pair", worst.2),
    );

    let g = trajs[0].last();
    let mask: Vec<bool> = (0..g.ny())
        .flat_map(|j| (0..g.nx()).map(move |i| (i, j)))
        .map(|(i, j)| g.center(i, j)[..g.dim()].iter().all(|c| c.abs() <= inner))
        .collect();
    let diffs: Vec<f64> = trajs
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0].last().values(), w[1].last().values());
            (0..a.len()).filter(|&k| mask[k]).map(|k| (a[k] - b[k]).abs()).sum::<f64>() * g.cell_volume()
        })
        .collect();
    let slack = diffs.windows(2).map(|d| 0.5 * d[0] - d[1]).fold(f64::INFINITY, f64::min);
    let mut rep = PropertyReport::new("cauchy_inner_box", slack, 0.0).with_ref("inner", inner);
    for (k, d) in diffs.iter().enumerate() {
        rep = rep.with_ref(format!("d{k}"), d);
    }
    set.push(rep);
    Ok(set)
}

/// Periodic copy of `u0` on a whole number of periods covering
/// `[-reach, reach]` on every axis.
fn tile_covering(u0: &GridFunction, reach: f64) -> Result<GridFunction> {
    let mut origin = Vec::new();
    let mut shape = Vec::new();
    for (a, (lo, hi)) in u0.extent().into_iter().enumerate() {
        let len = hi - lo;
        let left = ((lo + reach) / len).ceil().max(0.0);
        let right = ((reach - hi) / len).ceil().max(0.0);
        origin.push(lo - left * len);
        shape.push(u0.shape()[a] * (1 + left as usize + right as usize));
    }
    u0.tile_periodic(&origin, &shape)
}

/// The solutions obtained by truncating periodic data from above and from
/// below coincide with each other and with the periodic solution on the
/// inner box `|x|_∞ ≤ inner`.
pub fn check_periodic_coincidence(
    u0: &GridFunction,
    model: &ScalarModel,
    config: &SolverConfig,
    b_above: &[f64],
    b_below: &[f64],
    radii: &[f64],
    inner: f64,
) -> Result<ReportSet> {
    if u0.bc() != Boundary::Periodic {
        return Err(Error::Config("coincidence check needs periodic data".into()));
    }
    let (Some(&top), Some(&bottom), Some(&r_max)) = (b_above.first(), b_below.first(), radii.last()) else {
        return Err(Error::Config("level and radius lists must be nonempty".into()));
    };
    let mut cfg = config.clone();
    cfg.bound_range = Some((bottom, top));
    let big = tile_covering(u0, r_max + u0.cell_size())?;
    let above = truncation_sequence(&big, model, &cfg, b_above, radii)?;
    let below = truncation_sequence(&big, model, &cfg, b_below, radii)?;
    let periodic = solve(u0, model, &cfg)?;

    let (hi, lo) = (&above[above.len() - 1], &below[below.len() - 1]);
    let inside: Vec<usize> = (0..big.ny())
        .flat_map(|j| (0..big.nx()).map(move |i| (i, j)))
        .filter(|&(i, j)| big.center(i, j)[..big.dim()].iter().all(|c| c.abs() <= inner))
        .map(|(i, j)| big.index(i, j))
        .collect();
    let mut gap_pair: f64 = 0.0;
    let mut gap_periodic: f64 = 0.0;
    for (((_, a), (_, b)), (_, p)) in hi.states().into_iter().zip(lo.states()).zip(periodic.states()) {
        let p = p.tile_periodic(big.origin(), big.shape())?;
        for &k in &inside {
            let (x, y, z) = (a.values()[k], b.values()[k], p.values()[k]);
            gap_pair = gap_pair.max((x - y).abs());
            gap_periodic = gap_periodic.max((x - z).abs()).max((y - z).abs());
        }
    }
    let mut set = ReportSet::default();
    set.push(PropertyReport::new("above_below_coincide", -gap_pair, CONTRACTION_TOL).with_ref("inner", inner));
    set.push(PropertyReport::new("coincide_with_periodic", -gap_periodic, CONTRACTION_TOL).with_ref("inner", inner));
    if radii.len() >= 3 {
        for (tag, seq) in [("above", &above), ("below", &below)] {
            for mut r in check_extremal_convergence(seq, inner)?.reports {
                r.name = format!("{}_{tag}", r.name);
                set.push(r);
            }
        }
    }
    Ok(set)
}
