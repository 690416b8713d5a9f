//! Nonlinearity-diffusivity analysis.
//!
//! A value `u` is *degenerate* when some neighborhood of it carries an affine
//! flux vector together with an identically vanishing diffusion matrix. The
//! set `F` collects the non-degenerate values; decay needs `F` to accumulate
//! at zero from both sides.

use serde::Serialize;

use super::piecewise::PiecewisePoly;
use super::poly::Poly;
use super::ScalarModel;
use crate::error::{Error, Result};
use crate::grid::LatticeSpec;
use crate::json::extended_real;

#[derive(Debug, Clone, Serialize)]
pub struct GnReport {
    pub holds: bool,
    /// Interval `(α, β)` with `β = 0` or `α = 0` on which the model is a
    /// linear transport equation; present iff `holds` is false.
    pub witness: Option<(f64, f64)>,
    /// Maximal open intervals of `urange` on which the model is degenerate.
    pub degenerate: Vec<(f64, f64)>,
    /// `F ∩ urange` as closed intervals (possibly single points).
    pub f_set: Vec<(f64, f64)>,
    #[serde(serialize_with = "extended_real")]
    pub sup_f_minus: f64,
    #[serde(serialize_with = "extended_real")]
    pub inf_f_plus: f64,
    pub urange: (f64, f64),
}

pub fn check_gn(model: &ScalarModel) -> GnReport {
    let (lo, hi) = model.urange();
    let fns: Vec<&PiecewisePoly> = model
        .flux()
        .iter()
        .chain(model.diffusion().iter().flatten())
        .collect();
    let mut cuts = vec![lo];
    cuts.extend(
        PiecewisePoly::merged_breakpoints(&fns)
            .into_iter()
            .filter(|&b| b > lo && b < hi),
    );
    cuts.push(hi);

    // (a, b, affine flux pieces) for each maximal degenerate run
    let mut runs: Vec<(f64, f64, Vec<Poly>)> = Vec::new();
    let mut prev_degenerate = false;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let flux: Vec<Poly> = model.flux().iter().map(|f| f.piece_at(mid).trimmed()).collect();
        let degenerate = flux.iter().all(Poly::is_affine)
            && model.diffusion().iter().flatten().all(|a| a.piece_at(mid).is_zero());
        if degenerate {
            match runs.last_mut() {
                Some(run)
                    if prev_degenerate
                        && run.1 == w[0]
                        && run.2.iter().zip(&flux).all(|(p, q)| p.same_as(q)) =>
                {
                    run.1 = w[1];
                }
                _ => runs.push((w[0], w[1], flux)),
            }
        }
        prev_degenerate = degenerate;
    }
    let degenerate: Vec<(f64, f64)> = runs.iter().map(|r| (r.0, r.1)).collect();

    // endpoints of urange bordering a degenerate run are not in F
    let mut f_set = Vec::new();
    let mut start = Some(lo);
    for &(a, b) in &degenerate {
        if let Some(s) = start {
            if a > lo {
                f_set.push((s, a));
            }
        }
        start = (b < hi).then_some(b);
    }
    if let Some(s) = start {
        f_set.push((s, hi));
    }

    let sup_f_minus = f_set
        .iter()
        .filter(|c| c.0 < 0.0)
        .map(|c| c.1.min(0.0))
        .fold(f64::NEG_INFINITY, f64::max);
    let inf_f_plus = f_set
        .iter()
        .filter(|c| c.1 > 0.0)
        .map(|c| c.0.max(0.0))
        .fold(f64::INFINITY, f64::min);

    // a side with no room in urange imposes no condition
    let pos_ok = hi <= 0.0 || inf_f_plus == 0.0;
    let neg_ok = lo >= 0.0 || sup_f_minus == 0.0;
    let witness = if !pos_ok {
        degenerate
            .iter()
            .find(|&&(a, b)| a <= 0.0 && b > 0.0)
            .map(|&(_, b)| (0.0, b))
    } else if !neg_ok {
        degenerate
            .iter()
            .find(|&&(a, b)| a < 0.0 && b >= 0.0)
            .map(|&(a, _)| (a, 0.0))
    } else {
        None
    };

    GnReport {
        holds: pos_ok && neg_ok,
        witness,
        degenerate,
        f_set,
        sup_f_minus,
        inf_f_plus,
        urange: (lo, hi),
    }
}

/// Points `B⁻ ≤ m⁻ ≤ m⁺ ≤ B⁺` of `F` closest to the given means.
pub fn nearest_f_values(report: &GnReport, m_minus: f64, m_plus: f64) -> Result<(f64, f64)> {
    if m_minus > m_plus {
        return Err(Error::Analysis(format!("m_minus={m_minus} exceeds m_plus={m_plus}")));
    }
    let b_minus = report
        .f_set
        .iter()
        .filter(|c| c.0 <= m_minus)
        .map(|c| c.1.min(m_minus))
        .fold(f64::NEG_INFINITY, f64::max);
    if b_minus == f64::NEG_INFINITY {
        return Err(Error::Analysis(format!("no point of F at or below m_minus={m_minus}")));
    }
    let b_plus = report
        .f_set
        .iter()
        .filter(|c| c.1 >= m_plus)
        .map(|c| c.0.max(m_plus))
        .fold(f64::INFINITY, f64::min);
    if b_plus == f64::INFINITY {
        return Err(Error::Analysis(format!("no point of F at or above m_plus={m_plus}")));
    }
    Ok((b_minus, b_plus))
}

/// Offending dual vector for the periodic decay hypothesis.
#[derive(Debug, Clone, Serialize)]
pub struct HypothesisWitness {
    /// Integer coordinates in the dual basis.
    pub coords: Vec<i64>,
    pub xi: Vec<f64>,
    /// Largest probed neighborhood of the mean on which `ξ·φ` is affine and
    /// `a ξ·ξ` vanishes.
    pub interval: (f64, f64),
}

#[derive(Debug, Clone, Serialize)]
pub struct HypothesisReport {
    pub holds: bool,
    pub mean: f64,
    pub xi_bound: i64,
    pub vectors_checked: usize,
    pub witnesses: Vec<HypothesisWitness>,
    pub note: String,
}

/// Number of halvings in the shrinking-neighborhood family.
const NEIGHBORHOOD_LEVELS: i32 = 40;
const MAX_WITNESSES: usize = 16;
const COMBINATION_RTOL: f64 = 1e-12;

/// Checks that no nonzero dual vector `ξ` (coordinates bounded by
/// `xi_bound`) makes `ξ·φ` affine and `a ξ·ξ` vanish near `mean`.
pub fn thm_hypothesis_periodic(
    model: &ScalarModel,
    lattice: &LatticeSpec,
    mean: f64,
    xi_bound: i64,
) -> Result<HypothesisReport> {
    let (lo, hi) = model.urange();
    if !(mean > lo && mean < hi) {
        return Err(Error::Domain(format!("mean {mean} not inside urange ({lo}, {hi})")));
    }
    if lattice.dim() != model.dim() {
        return Err(Error::Config(format!(
            "lattice dimension {} does not match model dimension {}",
            lattice.dim(),
            model.dim()
        )));
    }
    if xi_bound < 1 {
        return Err(Error::Config("xi_bound must be at least 1".into()));
    }
    let width = (mean - lo).min(hi - mean);
    let mut witnesses = Vec::new();
    let mut checked = 0;
    for coords in half_space_vectors(model.dim(), xi_bound) {
        checked += 1;
        let xi = lattice.dual_point(&coords);
        let degenerate_on = |delta: f64| degenerate_along(model, &xi, mean - delta, mean + delta);
        let smallest = width * 0.5f64.powi(NEIGHBORHOOD_LEVELS);
        if !degenerate_on(smallest) {
            continue;
        }
        let delta = (0..=NEIGHBORHOOD_LEVELS)
            .map(|m| width * 0.5f64.powi(m))
            .find(|&d| degenerate_on(d))
            .unwrap_or(smallest);
        if witnesses.len() < MAX_WITNESSES {
            witnesses.push(HypothesisWitness { coords, xi, interval: (mean - delta, mean + delta) });
        }
    }
    Ok(HypothesisReport {
        holds: witnesses.is_empty(),
        mean,
        xi_bound,
        vectors_checked: checked,
        witnesses,
        note: format!("hypothesis verified up to |xi| <= {xi_bound} in dual-basis coordinates"),
    })
}

/// Integer vectors with entries in `[-bound, bound]`, one of each `±` pair.
fn half_space_vectors(dim: usize, bound: i64) -> Vec<Vec<i64>> {
    match dim {
        1 => (1..=bound).map(|k| vec![k]).collect(),
        _ => {
            let mut out = Vec::new();
            for k1 in 0..=bound {
                for k2 in -bound..=bound {
                    if k1 == 0 && k2 <= 0 {
                        continue;
                    }
                    out.push(vec![k1, k2]);
                }
            }
            out
        }
    }
}

/// Whether `ξ·φ` is one affine function and `a ξ·ξ ≡ 0` on `(a, b)`.
fn degenerate_along(model: &ScalarModel, xi: &[f64], a: f64, b: f64) -> bool {
    let dim = model.dim();
    let mut cuts = vec![a];
    for f in model.flux().iter().chain(model.diffusion().iter().flatten()) {
        cuts.extend(f.breakpoints().iter().copied().filter(|&c| c > a && c < b));
    }
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut affine: Option<(f64, f64, f64)> = None;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let (comb, scale) = combine(model.flux().iter().map(|f| f.piece_at(mid)), xi.iter().copied());
        if !is_zero_beyond(&comb, &scale, 2) {
            return false;
        }
        let c0 = comb.coeffs().first().copied().unwrap_or(0.0);
        let c1 = comb.coeffs().get(1).copied().unwrap_or(0.0);
        let s = scale.iter().take(2).fold(0.0, |m: f64, &x| m.max(x)).max(f64::MIN_POSITIVE);
        match affine {
            None => affine = Some((c0, c1, s)),
            Some((p0, p1, _)) => {
                let tol = COMBINATION_RTOL * s;
                if (p0 - c0).abs() > tol || (p1 - c1).abs() > tol {
                    return false;
                }
            }
        }
        let pieces = (0..dim).flat_map(|i| (0..dim).map(move |j| (i, j)));
        let (quad, qscale) = combine(
            pieces.clone().map(|(i, j)| model.diffusion()[i][j].piece_at(mid)),
            pieces.map(|(i, j)| xi[i] * xi[j]),
        );
        if !is_zero_beyond(&quad, &qscale, 0) {
            return false;
        }
    }
    true
}

/// `Σ w_k p_k` together with the per-coefficient magnitude `Σ |w_k||p_k|`.
fn combine<'a>(
    polys: impl Iterator<Item = &'a Poly>,
    weights: impl Iterator<Item = f64>,
) -> (Poly, Vec<f64>) {
    let mut sum = Poly::zero();
    let mut scale = Poly::zero();
    for (p, w) in polys.zip(weights) {
        sum = &sum + &p.scale(w);
        scale = &scale + &Poly(p.coeffs().iter().map(|c| (c * w).abs()).collect());
    }
    (sum, scale.0)
}

fn is_zero_beyond(p: &Poly, scale: &[f64], from: usize) -> bool {
    p.coeffs()
        .iter()
        .enumerate()
        .skip(from)
        .all(|(k, &c)| c.abs() <= COMBINATION_RTOL * scale.get(k).copied().unwrap_or(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pp(c: Vec<f64>) -> PiecewisePoly {
        PiecewisePoly::polynomial(Poly::new(c), -1.0, 1.0).unwrap()
    }

    fn zero() -> PiecewisePoly {
        pp(vec![0.0])
    }

    fn indicator_outside_half() -> PiecewisePoly {
        PiecewisePoly::new(
            vec![-1.0, -0.5, 0.5, 1.0],
            vec![Poly::constant(1.0), Poly::zero(), Poly::constant(1.0)],
        )
        .unwrap()
    }

    #[test]
    fn burgers_satisfies_gn() {
        let r = check_gn(&ScalarModel::burgers((-1.0, 1.0)).unwrap());
        assert!(r.holds);
        assert_eq!(r.f_set, vec![(-1.0, 1.0)]);
        assert!(r.degenerate.is_empty());
        assert_eq!((r.sup_f_minus, r.inf_f_plus), (0.0, 0.0));
        assert!(r.witness.is_none());
    }

    #[test]
    fn affine_flux_fails_with_positive_witness() {
        let r = check_gn(&ScalarModel::linear(2.0, (-1.0, 1.0)).unwrap());
        assert!(!r.holds);
        assert_eq!(r.witness, Some((0.0, 1.0)));
        assert!(r.f_set.is_empty());
        assert_eq!(r.sup_f_minus, f64::NEG_INFINITY);
        assert_eq!(r.inf_f_plus, f64::INFINITY);
    }

    #[test]
    fn degenerate_core_gives_two_sided_f_set() {
        let m = ScalarModel::new(vec![zero()], vec![vec![indicator_outside_half()]], (-1.0, 1.0)).unwrap();
        let r = check_gn(&m);
        assert!(!r.holds);
        assert_eq!(r.degenerate, vec![(-0.5, 0.5)]);
        assert_eq!(r.f_set, vec![(-1.0, -0.5), (0.5, 1.0)]);
        assert_eq!(r.sup_f_minus, -0.5);
        assert_eq!(r.inf_f_plus, 0.5);
        assert_eq!(r.witness, Some((0.0, 0.5)));
    }

    #[test]
    fn degenerate_gap_away_from_zero_keeps_gn() {
        let diff = PiecewisePoly::new(
            vec![-1.0, 0.2, 0.4, 1.0],
            vec![Poly::constant(1.0), Poly::zero(), Poly::constant(1.0)],
        )
        .unwrap();
        let r = check_gn(&ScalarModel::new(vec![zero()], vec![vec![diff]], (-1.0, 1.0)).unwrap());
        assert!(r.holds);
        assert_eq!(r.f_set, vec![(-1.0, 0.2), (0.4, 1.0)]);
    }

    #[test]
    fn kink_between_affine_pieces_is_in_f() {
        // |u| flux: affine on both sides with a kink at 0
        let flux = PiecewisePoly::new(
            vec![-1.0, 0.0, 1.0],
            vec![Poly::affine(0.0, -1.0), Poly::affine(0.0, 1.0)],
        )
        .unwrap();
        let r = check_gn(&ScalarModel::new(vec![flux], vec![vec![zero()]], (-1.0, 1.0)).unwrap());
        assert_eq!(r.f_set, vec![(0.0, 0.0)]);
        assert_eq!(r.degenerate, vec![(-1.0, 0.0), (0.0, 1.0)]);
        assert!(!r.holds);
        assert_eq!(nearest_f_values(&r, 0.0, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn refinement_does_not_change_report() {
        let m = ScalarModel::new(vec![zero()], vec![vec![indicator_outside_half()]], (-1.0, 1.0)).unwrap();
        let refined = ScalarModel::new(
            vec![zero().refined(&[0.1, 0.7])],
            vec![vec![indicator_outside_half().refined(&[-0.25, 0.0, 0.25])]],
            (-1.0, 1.0),
        )
        .unwrap();
        let (a, b) = (check_gn(&m), check_gn(&refined));
        assert_eq!(a.f_set, b.f_set);
        assert_eq!(a.degenerate, b.degenerate);
        assert_eq!(a.holds, b.holds);
    }

    #[test]
    fn nearest_values() {
        let burgers = check_gn(&ScalarModel::burgers((-1.0, 1.0)).unwrap());
        assert_eq!(nearest_f_values(&burgers, -0.1, 0.1).unwrap(), (-0.1, 0.1));
        let m = ScalarModel::new(vec![zero()], vec![vec![indicator_outside_half()]], (-1.0, 1.0)).unwrap();
        let r = check_gn(&m);
        assert_eq!(nearest_f_values(&r, -0.2, 0.3).unwrap(), (-0.5, 0.5));
        assert!(matches!(nearest_f_values(&r, -0.2, 1.5), Err(Error::Analysis(_))));
        let affine = check_gn(&ScalarModel::linear(1.0, (-1.0, 1.0)).unwrap());
        assert!(nearest_f_values(&affine, 0.0, 0.0).is_err());
    }

    #[test]
    fn periodic_hypothesis_examples() {
        let z = LatticeSpec::new(vec![vec![1.0]]).unwrap();
        let r = thm_hypothesis_periodic(&ScalarModel::burgers((-1.0, 1.0)).unwrap(), &z, 0.0, 50).unwrap();
        assert!(r.holds);
        assert_eq!(r.vectors_checked, 50);

        let r = thm_hypothesis_periodic(&ScalarModel::linear(0.7, (-1.0, 1.0)).unwrap(), &z, 0.0, 5).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witnesses[0].coords, vec![1]);
        assert_eq!(r.witnesses[0].xi, vec![1.0]);

        let z2 = LatticeSpec::new(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let m = ScalarModel::new(
            vec![pp(vec![0.0, 0.0, 0.5]), zero()],
            vec![vec![zero(), zero()], vec![zero(), zero()]],
            (-1.0, 1.0),
        )
        .unwrap();
        let r = thm_hypothesis_periodic(&m, &z2, 0.0, 3).unwrap();
        assert!(!r.holds);
        assert_eq!(r.witnesses[0].coords, vec![0, 1]);
        assert_eq!(r.witnesses[0].xi, vec![0.0, 1.0]);
        assert_eq!(r.vectors_checked, (7 * 7 - 1) / 2);
    }

    #[test]
    fn hypothesis_sees_local_degeneracy_only_near_mean() {
        // degenerate on (-0.5, 0.5) only
        let m = ScalarModel::new(vec![zero()], vec![vec![indicator_outside_half()]], (-1.0, 1.0)).unwrap();
        let z = LatticeSpec::new(vec![vec![1.0]]).unwrap();
        assert!(!thm_hypothesis_periodic(&m, &z, 0.0, 3).unwrap().holds);
        assert!(thm_hypothesis_periodic(&m, &z, 0.75, 3).unwrap().holds);
    }

    #[test]
    fn hypothesis_rejects_mean_on_boundary() {
        let z = LatticeSpec::new(vec![vec![1.0]]).unwrap();
        let m = ScalarModel::burgers((-1.0, 1.0)).unwrap();
        assert!(thm_hypothesis_periodic(&m, &z, 1.0, 3).is_err());
    }
}
