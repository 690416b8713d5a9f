//! Dense univariate polynomials in the global variable `u`.

use std::ops::{Add, Mul, Neg, Sub};

/// Polynomial with coefficients stored constant term first.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly(pub Vec<f64>);

impl Poly {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Poly(coeffs)
    }

    pub fn zero() -> Self {
        Poly(vec![0.0])
    }

    pub fn constant(c: f64) -> Self {
        Poly(vec![c])
    }

    /// `c0 + c1 u`.
    pub fn affine(c0: f64, c1: f64) -> Self {
        Poly(vec![c0, c1])
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.0
    }

    pub fn eval(&self, u: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, &c| acc * u + c)
    }

    /// Degree after discarding exactly-zero leading coefficients; the zero
    /// polynomial reports degree 0.
    pub fn degree(&self) -> usize {
        self.0.iter().rposition(|&c| c != 0.0).unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }

    /// True when every coefficient of order two and higher vanishes exactly.
    pub fn is_affine(&self) -> bool {
        self.0.iter().skip(2).all(|&c| c == 0.0)
    }

    pub fn derivative(&self) -> Poly {
        if self.0.len() <= 1 {
            return Poly::zero();
        }
        Poly(
            self.0
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    /// Antiderivative with zero constant term.
    pub fn antiderivative(&self) -> Poly {
        let mut out = Vec::with_capacity(self.0.len() + 1);
        out.push(0.0);
        out.extend(self.0.iter().enumerate().map(|(k, &c)| c / (k + 1) as f64));
        Poly(out)
    }

    /// Exact integral over `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        let p = self.antiderivative();
        p.eval(b) - p.eval(a)
    }

    pub fn scale(&self, s: f64) -> Poly {
        Poly(self.0.iter().map(|&c| c * s).collect())
    }

    /// Strip trailing zero coefficients, keeping at least one.
    pub fn trimmed(&self) -> Poly {
        let n = self.degree() + 1;
        Poly(self.0[..n.min(self.0.len()).max(1)].to_vec())
    }

    /// Structural equality modulo trailing zeros.
    pub fn same_as(&self, other: &Poly) -> bool {
        let n = self.0.len().max(other.0.len());
        (0..n).all(|k| {
            self.0.get(k).copied().unwrap_or(0.0) == other.0.get(k).copied().unwrap_or(0.0)
        })
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.0.len().max(rhs.0.len());
        Poly(
            (0..n)
                .map(|k| {
                    self.0.get(k).copied().unwrap_or(0.0) + rhs.0.get(k).copied().unwrap_or(0.0)
                })
                .collect(),
        )
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self + &(-rhs)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.scale(-1.0)
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + rhs.0.len() - 1];
        for (i, &a) in self.0.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            for (j, &b) in rhs.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

/// Real roots of `p` inside `(lo, hi)` located by sign changes on a uniform
/// sample of `samples` subintervals refined by bisection.
pub fn roots_in(p: &Poly, lo: f64, hi: f64, samples: usize) -> Vec<f64> {
    if p.degree() == 0 || !(hi > lo) {
        return Vec::new();
    }
    let samples = samples.max(2);
    let h = (hi - lo) / samples as f64;
    let mut roots = Vec::new();
    let mut x0 = lo;
    let mut f0 = p.eval(x0);
    for k in 1..=samples {
        let x1 = if k == samples { hi } else { lo + h * k as f64 };
        let f1 = p.eval(x1);
        if f0 == 0.0 && x0 > lo {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = p.eval(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}
