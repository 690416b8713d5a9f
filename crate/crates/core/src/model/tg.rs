//! The functional calculus `T_g(f)(u) = g(u-) f(u) - ∫_0^u f(s) dg(s)`.
//!
//! The Stieltjes integral runs over `[0, u)` for `u > 0` and equals
//! `-∫_{[u, 0)} f dg` for `u <= 0`. With this normalization
//! `T_g(f)(0) = g(0-) f(0)`. The operator acts on continuous `f` modulo
//! constants, so only differences `T_g(f)(u) - T_g(f)(v)` carry meaning.

use super::piecewise::PiecewisePoly;
use crate::error::{Error, Result};

pub fn tg_apply(g: &PiecewisePoly, f: &PiecewisePoly, u: f64) -> Result<f64> {
    if !f.is_continuous() && f.jumps().iter().any(|&(_, j)| j != 0.0) {
        return Err(Error::Config("T_g requires a continuous argument f".into()));
    }
    let lo = g.lo().min(f.lo());
    let hi = g.hi().max(f.hi());
    if !(lo..=hi).contains(&u) {
        return Err(Error::Domain(format!("u={u} outside [{lo}, {hi}]")));
    }
    let integral = if u > 0.0 {
        stieltjes(g, f, 0.0, u)
    } else {
        -stieltjes(g, f, u, 0.0)
    };
    Ok(g.eval_left(u) * f.eval(u) - integral)
}

/// `∫_{[a, b)} f dg` for piecewise polynomial `g` (absolutely continuous
/// part plus point masses at its jumps).
fn stieltjes(g: &PiecewisePoly, f: &PiecewisePoly, a: f64, b: f64) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let mut cuts = vec![a];
    cuts.extend(
        g.breakpoints()
            .iter()
            .chain(f.breakpoints())
            .copied()
            .filter(|&c| c > a && c < b),
    );
    cuts.push(b);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut total = 0.0;
    for w in cuts.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let dg = g.piece_at(mid).derivative();
        if dg.is_zero() {
            continue;
        }
        total += (f.piece_at(mid) * &dg).integrate(w[0], w[1]);
    }
    for (c, jump) in g.jumps() {
        if c >= a && c < b && jump != 0.0 {
            total += f.eval(c) * jump;
        }
    }
    total
}
