//! Exact Burgers solution for an indicator and the non-decaying
//! superposition of spreading blocks.

use crate::error::{Error, Result};
use crate::grid::{x_norm, Boundary, GridFunction};
use crate::initial::{build_initial, example1_blocks, GridSpec, InitialSpec, SUBSAMPLES};
use crate::model::ScalarModel;
use crate::solver::{solve, SolverConfig, Trajectory};

use super::{DecaySeries, PropertyReport, ReportSet};

/// Entropy solution of Burgers' equation `u_t + (u²/2)_x = 0` with data
/// `χ_[0,1]`: a rarefaction overtaken by the shock at `t = 2`, after which
/// the profile is the triangle `x/t` on `[0, √(2t))`.
pub fn burgers_exact(t: f64, x: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::Domain(format!("time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(if (0.0..1.0).contains(&x) { 1.0 } else { 0.0 });
    }
    Ok(if t <= 2.0 {
        if x < 0.0 {
            0.0
        } else if x < t {
            x / t
        } else if x < 1.0 + t / 2.0 {
            1.0
        } else {
            0.0
        }
    } else if (0.0..(2.0 * t).sqrt()).contains(&x) {
        x / t
    } else {
        0.0
    })
}

/// Solution for the unit-height block `[a, a + len)`, by the scaling
/// `u(t, x) = U(t/len, (x - a)/len)`.
pub fn scaled_block_solution(t: f64, x: f64, a: f64, len: f64) -> Result<f64> {
    burgers_exact(t / len, (x - a) / len)
}

/// Cell averages of `f` on the geometry of `like`.
pub(crate) fn cell_averages(like: &GridFunction, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
    GridFunction::sample(1, like.origin(), like.cell_size(), like.shape(), like.bc(), SUBSAMPLES, |x| f(x[0]))
}

/// Indicator of `∪_{k=1..n} [2^k, 2^k + k)` on `cells` cells of `[lo, hi]`.
pub fn example1_initial(n_blocks: u32, lo: f64, hi: f64, cells: usize) -> Result<GridFunction> {
    build_initial(
        &InitialSpec::Example1 { n_blocks },
        &GridSpec::interval(lo, hi, cells, Boundary::FarField(0.0)),
        None,
    )
}

pub struct Example1Outcome {
    pub trajectory: Trajectory,
    pub series: DecaySeries,
    pub reports: ReportSet,
}

/// Time between stored snapshots of the example run.
const EXAMPLE1_OUTPUT_DT: f64 = 0.05;
/// Allowed mass, in cells, by which the computed solution may undercut a
/// single-block exact solution: both edges of a block are smeared over a
/// few cells by the scheme.
const COMPARISON_TOL_CELLS: f64 = 10.0;

/// Runs Burgers from the block data and checks that the window norm stays
/// above `threshold` up to `t_max`, and that the solution dominates the
/// exact solution of each single block.
pub fn check_example1(
    n_blocks: u32,
    domain: (f64, f64),
    cells: usize,
    t_max: f64,
    threshold: f64,
) -> Result<Example1Outcome> {
    if n_blocks == 0 {
        return Err(Error::Config("example1 needs at least one block".into()));
    }
    let horizon = 2.0 * n_blocks as f64 - 2.0;
    if !(0.0..=horizon).contains(&t_max) {
        return Err(Error::Config(format!("t_max must lie in [0, {horizon}] for {n_blocks} blocks, got {t_max}")));
    }
    let u0 = example1_initial(n_blocks, domain.0, domain.1, cells)?;
    let model = ScalarModel::burgers((0.0, 1.0))?.with_name("burgers");
    let trajectory = if t_max > 0.0 {
        let count = (t_max / EXAMPLE1_OUTPUT_DT).ceil().max(1.0) as usize;
        solve(&u0, &model, &SolverConfig::uniform(0.45, t_max, count))?
    } else {
        Trajectory::from_snapshots(&model, u0.clone(), Vec::new())?
    };

    let blocks = example1_blocks(n_blocks);
    let h = u0.cell_size();
    let mut series = DecaySeries::default();
    let mut worst = vec![(0.0f64, 0.0f64); blocks.len()];
    for (t, u) in trajectory.states() {
        series.push(t, x_norm(u, 1.0)?, u.l1_norm(), u.min(), u.max());
        for (k, &(a, b)) in blocks.iter().enumerate() {
            let exact = cell_averages(u, |x| scaled_block_solution(t, x, a, b - a).unwrap_or(0.0))?;
            let under: f64 =
                exact.values().iter().zip(u.values()).map(|(e, v)| (e - v).max(0.0)).sum::<f64>() * h;
            if under > worst[k].0 {
                worst[k] = (under, t);
            }
        }
    }

    let mut reports = ReportSet::default();
    let (k_min, &x_min) = series
        .x_norm
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("at least the initial state");
    reports.push(
        PropertyReport::new("x_norm_floor", x_min - threshold, 0.0)
            .with_ref("t_min", series.t[k_min])
            .with_ref("x_norm_min", x_min),
    );
    for (k, &(under, t)) in worst.iter().enumerate() {
        reports.push(
            PropertyReport::new(format!("dominates_block_{}", k + 1), -under, COMPARISON_TOL_CELLS * h)
                .with_ref("t_worst", t),
        );
    }
    Ok(Example1Outcome { trajectory, series, reports })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_profile_values() {
        assert_eq!(burgers_exact(1.0, 0.5).unwrap(), 0.5);
        assert_eq!(burgers_exact(1.0, 1.2).unwrap(), 1.0);
        assert_eq!(burgers_exact(1.0, 1.6).unwrap(), 0.0);
        assert_eq!(burgers_exact(8.0, 3.0).unwrap(), 0.375);
        assert_eq!(burgers_exact(8.0, 4.0).unwrap(), 0.0);
        assert_eq!(burgers_exact(0.0, 0.5).unwrap(), 1.0);
        assert!(matches!(burgers_exact(-1.0, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn exact_profile_conserves_mass() {
        // midpoint rule on a fine mesh, independent of the closed form
        for t in [0.3, 1.0, 2.0, 2.5, 10.0] {
            let n = 200_000;
            let (a, b) = (-1.0, 10.0);
            let h = (b - a) / n as f64;
            let m: f64 = (0..n).map(|i| burgers_exact(t, a + (i as f64 + 0.5) * h).unwrap()).sum::<f64>() * h;
            assert!((m - 1.0).abs() < 1e-4, "t={t} mass={m}");
        }
    }

    #[test]
    fn scaled_blocks() {
        // block [4, 6) at t = 2 is the unit profile at t = 1
        assert_eq!(scaled_block_solution(2.0, 5.0, 4.0, 2.0).unwrap(), 0.5);
        assert_eq!(scaled_block_solution(2.0, 6.4, 4.0, 2.0).unwrap(), 1.0);
    }

    #[test]
    fn example1_arguments() {
        assert!(matches!(example1_initial(0, 0.0, 10.0, 100), Err(Error::Config(_))));
        assert!(matches!(check_example1(3, (0.0, 40.0), 400, 5.0, 0.9), Err(Error::Config(_))));
        let g = example1_initial(2, 0.0, 8.0, 80).unwrap();
        assert!((g.mass() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn coarse_example1_keeps_its_window_norm() {
        let out = check_example1(3, (0.0, 40.0), 800, 1.0, 0.9).unwrap();
        assert!(out.reports.all_pass(), "{:?}", out.reports);
        assert_eq!(out.series.t[0], 0.0);
        assert!((out.series.x_norm[0] - 2.0).abs() < 1e-12);
    }
}
