//! Weak-form entropy residual.
//!
//! For a convex `η` and a test function `f ≥ 0` the residual is
//!
//! ```text
//! ∫∫ η(u) f_t + T_η'(φ)(u)·∇f + T_η'(A)(u) : D²f  dx dt  +  ∫ η(u0) f(0, ·) dx
//! ```
//!
//! which an entropy solution keeps nonnegative. The dissipation term of the
//! full inequality is nonnegative and left out. The solution is taken
//! piecewise constant in space (cells) and in time (each snapshot holds
//! until the next one), and every space or time derivative of `f` is
//! integrated exactly over a cell or a time interval.

use serde::{Deserialize, Serialize};

use super::Trajectory;
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::model::{tg_apply, PiecewisePoly, Poly};

/// Smooth bump `exp(1 - 1/(1 - s²))` on `|s| < 1`, peak value 1.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub half_width: f64,
}

impl Bump {
    pub fn new(center: f64, half_width: f64) -> Self {
        Bump { center, half_width }
    }

    fn s(&self, x: f64) -> f64 {
        (x - self.center) / self.half_width
    }

    pub fn value(&self, x: f64) -> f64 {
        let s = self.s(x);
        if s.abs() >= 1.0 {
            0.0
        } else {
            (1.0 - 1.0 / (1.0 - s * s)).exp()
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        let s = self.s(x);
        if s.abs() >= 1.0 {
            return 0.0;
        }
        let q = 1.0 - s * s;
        self.value(x) * (-2.0 * s / (q * q)) / self.half_width
    }

    /// `∫_a^b bump` by composite Gauss-Legendre quadrature.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let lo = a.max(self.center - self.half_width);
        let hi = b.min(self.center + self.half_width);
        if !(hi > lo) {
            return 0.0;
        }
        let pieces = (((hi - lo) / self.half_width) * 64.0).ceil().max(1.0) as usize;
        let h = (hi - lo) / pieces as f64;
        (0..pieces)
            .map(|k| gauss(|x| self.value(x), lo + k as f64 * h, lo + (k + 1) as f64 * h))
            .sum()
    }

    fn support(&self) -> (f64, f64) {
        (self.center - self.half_width, self.center + self.half_width)
    }
}

fn gauss(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const X: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const W: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_5,
        0.478_628_670_499_366_5,
        0.236_926_885_056_189_1,
        0.236_926_885_056_189_1,
    ];
    let (m, r) = (0.5 * (a + b), 0.5 * (b - a));
    X.iter().zip(W).map(|(x, w)| w * f(m + r * x)).sum::<f64>() * r
}

/// Product test function `θ(t) Π X_a(x_a)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyTest {
    pub time: Bump,
    pub space: Vec<Bump>,
}

/// `η'` of the Kruzhkov entropy `|u - k|` smoothed on `|u - k| < ε` by the
/// cubic `(3s - s³)/2`, `s = (u - k)/ε`, so that `η ∈ C²`.
pub fn smoothed_kruzhkov(k: f64, eps: f64, lo: f64, hi: f64) -> PiecewisePoly {
    let s = Poly::affine(-k / eps, 1.0 / eps);
    let s2 = &s * &s;
    let cubic = (&s * &(&Poly::constant(3.0) - &s2)).scale(0.5);
    let a = (k - eps).min(lo) - 1.0;
    let b = (k + eps).max(hi) + 1.0;
    // the global-u cubic meets ±1 only up to rounding, so no continuity flag
    PiecewisePoly::new(
        vec![a, k - eps, k + eps, b],
        vec![Poly::constant(-1.0), cubic, Poly::constant(1.0)],
    )
    .expect("breakpoints increase")
}

/// Smoothed `η` itself, consistent with [`smoothed_kruzhkov`].
fn eta(k: f64, eps: f64, u: f64) -> f64 {
    let s = (u - k) / eps;
    if s.abs() >= 1.0 {
        (u - k).abs()
    } else {
        eps * (0.75 * s * s - 0.125 * s.powi(4) + 0.375)
    }
}

/// `T_g(f)` as a piecewise polynomial: the primitive of `g f'`, anchored to
/// the operator's own value at `anchor`.
fn entropy_flux(g: &PiecewisePoly, f: &PiecewisePoly, anchor: f64) -> Result<PiecewisePoly> {
    let p = g.product(&f.derivative()).primitive();
    let shift = tg_apply(g, f, anchor)? - p.eval(anchor);
    let pieces = p
        .pieces()
        .iter()
        .map(|q| q + &Poly::constant(shift))
        .collect();
    PiecewisePoly::new(p.breakpoints().to_vec(), pieces)
}

/// Per-axis cell integrals of `X`, `X` and `X'` at faces.
struct AxisWeights {
    integral: Vec<f64>,
    face_value: Vec<f64>,
    face_slope: Vec<f64>,
}

fn axis_weights(bump: &Bump, origin: f64, h: f64, n: usize) -> AxisWeights {
    let face = |i: usize| origin + i as f64 * h;
    AxisWeights {
        integral: (0..n).map(|i| bump.integral(face(i), face(i + 1))).collect(),
        face_value: (0..=n).map(|i| bump.value(face(i))).collect(),
        face_slope: (0..=n).map(|i| bump.derivative(face(i))).collect(),
    }
}

/// Residuals for every `(k, test)` pair, `k` varying slowest.
pub fn entropy_residual(traj: &Trajectory, k_values: &[f64], tests: &[EntropyTest]) -> Result<Vec<f64>> {
    let model = &traj.model;
    let g0 = &traj.initial;
    let dim = g0.dim();
    let states = traj.states();
    let t_last = states.last().map_or(0.0, |s| s.0);
    let extent = g0.extent();
    for test in tests {
        if test.space.len() != dim {
            return Err(Error::Config("test function dimension does not match the grid".into()));
        }
        if test.time.support().1 > t_last {
            return Err(Error::Config(format!(
                "test function reaches t={} beyond the last snapshot t={t_last}",
                test.time.support().1
            )));
        }
        for (b, (lo, hi)) in test.space.iter().zip(&extent) {
            let (a, c) = b.support();
            if a < *lo || c > *hi {
                return Err(Error::Config(format!("test support [{a}, {c}] leaves the box [{lo}, {hi}]")));
            }
        }
    }

    let (ulo, uhi) = model.urange();
    let (vlo, vhi) = states.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (_, g)| {
        (a.min(g.min()), b.max(g.max()))
    });
    let l_phi: f64 = (0..dim).map(|a| model.flux_slope_bound(a, vlo, vhi, 1024)).sum();
    let h = g0.cell_size();
    let eps = if l_phi > 0.0 { 2.0 * h * l_phi } else { 2.0 * h };

    let mut out = Vec::with_capacity(k_values.len() * tests.len());
    for &k in k_values {
        if !(ulo..=uhi).contains(&k) {
            return Err(Error::Domain(format!("k={k} outside urange [{ulo}, {uhi}]")));
        }
        let g = smoothed_kruzhkov(k, eps, ulo, uhi);
        let q: Vec<PiecewisePoly> =
            model.flux().iter().map(|f| entropy_flux(&g, f, k)).collect::<Result<_>>()?;
        let prim = model.primitive();
        let r: Vec<Vec<PiecewisePoly>> = prim
            .iter()
            .map(|row| row.iter().map(|a| entropy_flux(&g, a, k)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        for test in tests {
            out.push(residual_one(&states, k, eps, &q, &r, test));
        }
    }
    Ok(out)
}

fn residual_one(
    states: &[(f64, &GridFunction)],
    k: f64,
    eps: f64,
    q: &[PiecewisePoly],
    r: &[Vec<PiecewisePoly>],
    test: &EntropyTest,
) -> f64 {
    let g0 = states[0].1;
    let dim = g0.dim();
    let h = g0.cell_size();
    let origin = g0.origin();
    let wx = axis_weights(&test.space[0], origin[0], h, g0.nx());
    let wy = if dim == 2 {
        axis_weights(&test.space[1], origin[1], h, g0.ny())
    } else {
        // y direction of a 1D grid: unit weight, no derivatives
        AxisWeights { integral: vec![1.0], face_value: vec![0.0, 0.0], face_slope: vec![0.0, 0.0] }
    };
    let (nx, ny) = (g0.nx(), g0.ny());
    // cells touched by the spatial support
    let active: Vec<(usize, usize)> = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| (i, j)))
        .filter(|&(i, j)| {
            let x = wx.integral[i] != 0.0 || wx.face_value[i] != 0.0 || wx.face_value[i + 1] != 0.0;
            let y = dim == 1 || wy.integral[j] != 0.0 || wy.face_value[j] != 0.0 || wy.face_value[j + 1] != 0.0;
            x && y
        })
        .collect();

    let cell_terms = |u: &GridFunction, theta_dt: f64, theta_int: f64| -> f64 {
        let mut acc = 0.0;
        for &(i, j) in &active {
            let v = u.get(i, j);
            let ix = wx.integral[i];
            let dxv = wx.face_value[i + 1] - wx.face_value[i];
            let dxs = wx.face_slope[i + 1] - wx.face_slope[i];
            let mut cell = eta(k, eps, v) * ix * wy.integral[j] * theta_dt;
            let mut flux = q[0].eval(v) * dxv * wy.integral[j] + r[0][0].eval(v) * dxs * wy.integral[j];
            if dim == 2 {
                let dyv = wy.face_value[j + 1] - wy.face_value[j];
                let dys = wy.face_slope[j + 1] - wy.face_slope[j];
                flux += q[1].eval(v) * ix * dyv + r[1][1].eval(v) * ix * dys;
                flux += 2.0 * r[0][1].eval(v) * dxv * dyv;
            }
            cell += flux * theta_int;
            acc += cell;
        }
        acc
    };

    let theta = &test.time;
    let mut total = 0.0;
    for w in states.windows(2) {
        let (t0, u) = w[0];
        let t1 = w[1].0;
        let (a, b) = theta.support();
        if t1 <= a.max(0.0) || t0 >= b {
            continue;
        }
        let d_theta = theta.value(t1) - theta.value(t0);
        let i_theta = theta.integral(t0, t1);
        total += cell_terms(u, d_theta, i_theta);
    }
    // initial term ∫ η(u0) f(0, ·)
    let theta0 = theta.value(0.0);
    if theta0 != 0.0 {
        total += cell_terms(g0, theta0, 0.0);
    }
    total
}
