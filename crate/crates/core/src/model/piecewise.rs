//! Piecewise polynomial functions of a scalar argument.
//!
//! A [`PiecewisePoly`] carries breakpoints `b_0 < b_1 < ... < b_m` and one
//! polynomial per interval `[b_i, b_{i+1})`. Values are right-continuous at
//! interior breakpoints and the first and last pieces extend past the ends
//! of the breakpoint range. Coefficients are expressed in the global
//! variable `u`, so degree tests ("affine", "identically zero") are exact
//! coefficient inspections.

use super::poly::{roots_in, Poly};
use crate::error::{Error, Result};

/// Continuity tolerance at shared breakpoints.
pub const CONTINUITY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePoly {
    breakpoints: Vec<f64>,
    pieces: Vec<Poly>,
    continuous: bool,
}

impl PiecewisePoly {
    pub fn new(breakpoints: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        if breakpoints.len() < 2 {
            return Err(Error::Config("piecewise polynomial needs at least two breakpoints".into()));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::Config("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("breakpoints must be strictly increasing".into()));
        }
        if pieces.len() != breakpoints.len() - 1 {
            return Err(Error::Config(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() - 1,
                pieces.len()
            )));
        }
        if pieces.iter().any(|p| p.coeffs().is_empty()) {
            return Err(Error::Config("each piece needs at least one coefficient".into()));
        }
        if pieces.iter().flat_map(|p| p.coeffs()).any(|c| !c.is_finite()) {
            return Err(Error::Config("coefficients must be finite".into()));
        }
        Ok(PiecewisePoly { breakpoints, pieces, continuous: false })
    }

    /// Builds a function and validates continuity at every interior breakpoint.
    pub fn continuous(breakpoints: Vec<f64>, pieces: Vec<Poly>) -> Result<Self> {
        PiecewisePoly::new(breakpoints, pieces)?.into_continuous()
    }

    /// Sets the `continuous` flag after checking adjacent pieces agree.
    pub fn into_continuous(mut self) -> Result<Self> {
        if let Some((b, jump)) = self.worst_jump() {
            return Err(Error::Config(format!(
                "function is not continuous: jump {jump:e} at u={b}"
            )));
        }
        self.continuous = true;
        Ok(self)
    }

    fn worst_jump(&self) -> Option<(f64, f64)> {
        self.jumps()
            .into_iter()
            .filter(|&(b, j)| {
                let scale = 1f64.max(self.eval(b).abs());
                j.abs() > CONTINUITY_TOL * scale
            })
            .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
    }

    /// A single polynomial on `[lo, hi]` (extended beyond it).
    pub fn polynomial(p: Poly, lo: f64, hi: f64) -> Result<Self> {
        PiecewisePoly::continuous(vec![lo, hi], vec![p])
    }

    pub fn constant(c: f64, lo: f64, hi: f64) -> Result<Self> {
        PiecewisePoly::polynomial(Poly::constant(c), lo, hi)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Poly] {
        &self.pieces
    }

    pub fn is_continuous(&self) -> bool {
        self.continuous
    }

    pub fn lo(&self) -> f64 {
        self.breakpoints[0]
    }

    pub fn hi(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Index of the piece governing `u` (right-continuous convention).
    pub fn piece_index(&self, u: f64) -> usize {
        let interior = &self.breakpoints[1..self.breakpoints.len() - 1];
        interior.partition_point(|&b| b <= u)
    }

    /// Index of the piece governing values just left of `u`.
    pub fn left_piece_index(&self, u: f64) -> usize {
        let interior = &self.breakpoints[1..self.breakpoints.len() - 1];
        interior.partition_point(|&b| b < u)
    }

    pub fn piece_at(&self, u: f64) -> &Poly {
        &self.pieces[self.piece_index(u)]
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.pieces[self.piece_index(u)].eval(u)
    }

    /// Left limit `p(u-)`.
    pub fn eval_left(&self, u: f64) -> f64 {
        self.pieces[self.left_piece_index(u)].eval(u)
    }

    /// Interior breakpoints with the jump `p(b+) - p(b-)`.
    pub fn jumps(&self) -> Vec<(f64, f64)> {
        let m = self.breakpoints.len();
        (1..m - 1)
            .map(|i| {
                let b = self.breakpoints[i];
                (b, self.pieces[i].eval(b) - self.pieces[i - 1].eval(b))
            })
            .collect()
    }

    /// Piecewise derivative (jumps of `self` are ignored).
    pub fn derivative(&self) -> PiecewisePoly {
        PiecewisePoly {
            breakpoints: self.breakpoints.clone(),
            pieces: self.pieces.iter().map(Poly::derivative).collect(),
            continuous: false,
        }
    }

    /// Continuous antiderivative `P` with `P' = self` piecewise and `P(0) = 0`.
    pub fn primitive(&self) -> PiecewisePoly {
        let m = self.pieces.len();
        let mut out: Vec<Poly> = self.pieces.iter().map(Poly::antiderivative).collect();
        let k = self.piece_index(0.0);
        let c = out[k].eval(0.0);
        out[k].0[0] -= c;
        for i in k + 1..m {
            let b = self.breakpoints[i];
            let c = out[i - 1].eval(b) - out[i].eval(b);
            out[i].0[0] += c;
        }
        for i in (0..k).rev() {
            let b = self.breakpoints[i + 1];
            let c = out[i + 1].eval(b) - out[i].eval(b);
            out[i].0[0] += c;
        }
        PiecewisePoly { breakpoints: self.breakpoints.clone(), pieces: out, continuous: true }
    }

    /// Same function with the extra breakpoints `points` inserted.
    pub fn refined(&self, points: &[f64]) -> PiecewisePoly {
        let mut bps: Vec<f64> = self.breakpoints.iter().chain(points).copied().collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        self.on_breakpoints(bps)
    }

    /// Re-expresses the function on `bps`, which must be a superset of the
    /// interior breakpoints.
    fn on_breakpoints(&self, bps: Vec<f64>) -> PiecewisePoly {
        let pieces = bps
            .windows(2)
            .map(|w| self.piece_at(0.5 * (w[0] + w[1])).clone())
            .collect();
        PiecewisePoly { breakpoints: bps, pieces, continuous: self.continuous }
    }

    /// Union of the breakpoint sets of `fs`.
    pub fn merged_breakpoints(fs: &[&PiecewisePoly]) -> Vec<f64> {
        let mut bps: Vec<f64> = fs.iter().flat_map(|f| f.breakpoints.iter().copied()).collect();
        bps.sort_by(f64::total_cmp);
        bps.dedup();
        bps
    }

    /// `Σ weights[k] · fs[k]` on the merged breakpoints.
    pub fn linear_combination(fs: &[&PiecewisePoly], weights: &[f64]) -> PiecewisePoly {
        assert_eq!(fs.len(), weights.len());
        assert!(!fs.is_empty());
        let bps = PiecewisePoly::merged_breakpoints(fs);
        let pieces = bps
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                fs.iter()
                    .zip(weights)
                    .fold(Poly::zero(), |acc, (f, &c)| &acc + &f.piece_at(mid).scale(c))
            })
            .collect();
        let continuous = fs.iter().all(|f| f.continuous);
        PiecewisePoly { breakpoints: bps, pieces, continuous }
    }

    /// Pointwise product on the merged breakpoints.
    pub fn product(&self, other: &PiecewisePoly) -> PiecewisePoly {
        let bps = PiecewisePoly::merged_breakpoints(&[self, other]);
        let pieces = bps
            .windows(2)
            .map(|w| {
                let mid = 0.5 * (w[0] + w[1]);
                self.piece_at(mid) * other.piece_at(mid)
            })
            .collect();
        PiecewisePoly { breakpoints: bps, pieces, continuous: false }
    }

    /// True when both represent the same function, including extensions.
    pub fn same_function(&self, other: &PiecewisePoly) -> bool {
        let bps = PiecewisePoly::merged_breakpoints(&[self, other]);
        let left = bps[0] - 1.0;
        let right = bps[bps.len() - 1] + 1.0;
        let mids = std::iter::once(left)
            .chain(bps.windows(2).map(|w| 0.5 * (w[0] + w[1])))
            .chain(std::iter::once(right));
        mids.into_iter()
            .all(|m| self.piece_at(m).same_as(other.piece_at(m)))
    }

    /// Maximal subintervals of `[lo, hi]` on which one fixed polynomial
    /// governs, as `(a, b, polynomial)`; adjacent pieces carrying the same
    /// polynomial are fused.
    pub fn segments_on(&self, lo: f64, hi: f64) -> Vec<(f64, f64, Poly)> {
        let mut cuts = vec![lo];
        cuts.extend(self.breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
        cuts.push(hi);
        let mut out: Vec<(f64, f64, Poly)> = Vec::new();
        for w in cuts.windows(2) {
            let p = self.piece_at(0.5 * (w[0] + w[1])).trimmed();
            match out.last_mut() {
                Some(last) if last.2.same_as(&p) => last.1 = w[1],
                _ => out.push((w[0], w[1], p)),
            }
        }
        out
    }

    /// Points of `[lo, hi]` where `|self|` may attain its maximum: the ends,
    /// interior breakpoints and interior critical points of every piece.
    pub fn extremal_candidates(&self, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
        let mut pts = vec![lo, hi];
        for (a, b, p) in self.segments_on(lo, hi) {
            pts.push(a);
            pts.push(b);
            pts.extend(roots_in(&p.derivative(), a, b, samples));
        }
        pts.sort_by(f64::total_cmp);
        pts.dedup();
        pts
    }

    /// `max |self|` over `[lo, hi]`, taking both one-sided values at breakpoints.
    pub fn max_abs_on(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        self.extremal_candidates(lo, hi, samples)
            .into_iter()
            .map(|u| self.eval(u).abs().max(self.eval_left(u).abs()))
            .fold(0.0, f64::max)
    }

    /// `max self` over `[lo, hi]`, taking both one-sided values at breakpoints.
    pub fn max_on(&self, lo: f64, hi: f64, samples: usize) -> f64 {
        self.extremal_candidates(lo, hi, samples)
            .into_iter()
            .map(|u| self.eval(u).max(self.eval_left(u)))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Continuous antiderivative normalized to vanish at zero.
pub fn primitive(p: &PiecewisePoly) -> PiecewisePoly {
    p.primitive()
}
