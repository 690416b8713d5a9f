use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DET_TOL: f64 = 1e-10;
/// Distance below which a lattice point counts as lying on a subspace.
pub const SUBSPACE_TOL: f64 = 1e-9;
const MAX_DRAWS: usize = 100;

/// Period lattice `L = basis · ℤ^dim`; basis vectors are the columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeRaw", into = "LatticeRaw")]
pub struct LatticeSpec {
    basis: Vec<Vec<f64>>,
    dual: Vec<Vec<f64>>,
}

#[derive(Serialize, Deserialize)]
struct LatticeRaw {
    basis: Vec<Vec<f64>>,
}

impl TryFrom<LatticeRaw> for LatticeSpec {
    type Error = Error;
    fn try_from(raw: LatticeRaw) -> Result<Self> {
        LatticeSpec::new(raw.basis)
    }
}

impl From<LatticeSpec> for LatticeRaw {
    fn from(l: LatticeSpec) -> Self {
        LatticeRaw { basis: l.basis }
    }
}

impl LatticeSpec {
    /// `basis[row][col]`, columns spanning the lattice.
    pub fn new(basis: Vec<Vec<f64>>) -> Result<Self> {
        let dim = basis.len();
        if !(1..=2).contains(&dim) || basis.iter().any(|row| row.len() != dim) {
            return Err(Error::Config("lattice basis must be a 1x1 or 2x2 matrix".into()));
        }
        if basis.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Config("lattice basis has non-finite entries".into()));
        }
        let det = det(&basis);
        if det.abs() <= DET_TOL {
            return Err(Error::Config(format!("singular lattice basis (det = {det})")));
        }
        // dual = inverse transpose
        let dual = match dim {
            1 => vec![vec![1.0 / basis[0][0]]],
            _ => vec![
                vec![basis[1][1] / det, -basis[1][0] / det],
                vec![-basis[0][1] / det, basis[0][0] / det],
            ],
        };
        Ok(LatticeSpec { basis, dual })
    }

    pub fn integer(dim: usize) -> Self {
        let basis = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        LatticeSpec::new(basis).expect("identity is regular")
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn dual(&self) -> &[Vec<f64>] {
        &self.dual
    }

    pub fn det(&self) -> f64 {
        det(&self.basis)
    }

    /// `basis · k`.
    pub fn point(&self, k: &[i64]) -> Vec<f64> {
        mat_vec(&self.basis, k)
    }

    /// `dual · k`, an element of the dual lattice.
    pub fn dual_point(&self, k: &[i64]) -> Vec<f64> {
        mat_vec(&self.dual, k)
    }

    pub fn scaled(&self, r: f64) -> Result<Self> {
        LatticeSpec::new(self.basis.iter().map(|row| row.iter().map(|x| x * r).collect()).collect())
    }
}

fn det(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        _ => m[0][0] * m[1][1] - m[0][1] * m[1][0],
    }
}

fn mat_vec(m: &[Vec<f64>], k: &[i64]) -> Vec<f64> {
    m.iter()
        .map(|row| row.iter().zip(k).map(|(a, &b)| a * b as f64).sum())
        .collect()
}

/// Orthonormal basis of the span of `vectors` (Gram-Schmidt).
fn orthonormal(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for q in &out {
            let d: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
            w.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
        }
        let n = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        let scale = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 * scale.max(1e-300) && n > 0.0 {
            out.push(w.into_iter().map(|a| a / n).collect());
        }
    }
    out
}

fn distance_to(p: &[f64], onb: &[Vec<f64>]) -> f64 {
    let mut w = p.to_vec();
    for q in onb {
        let d: f64 = w.iter().zip(q).map(|(a, b)| a * b).sum();
        w.iter_mut().zip(q).for_each(|(a, b)| *a -= d * b);
    }
    w.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn integer_box(dim: usize, bound: i64) -> impl Iterator<Item = Vec<i64>> {
    let n = 2 * bound + 1;
    let total = n.pow(dim as u32);
    (0..total).filter_map(move |mut idx| {
        let mut k = Vec::with_capacity(dim);
        for _ in 0..dim {
            k.push(idx % n - bound);
            idx /= n;
        }
        (k.iter().any(|&c| c != 0)).then_some(k)
    })
}

/// First nonzero `ξ` with `‖ξ‖∞ ≤ xi_bound` whose lattice point `Aξ` lies
/// on one of the subspaces, each given by a spanning set.
pub fn lattice_meets_subspaces(
    lattice: &LatticeSpec,
    subspaces: &[Vec<Vec<f64>>],
    xi_bound: i64,
) -> Result<Option<Vec<i64>>> {
    let dim = lattice.dim();
    let mut bases = Vec::with_capacity(subspaces.len());
    for s in subspaces {
        if s.iter().any(|v| v.len() != dim) {
            return Err(Error::Config("subspace vector has wrong dimension".into()));
        }
        let onb = orthonormal(s);
        if onb.len() >= dim {
            return Err(Error::Config("subspace is not proper".into()));
        }
        bases.push(onb);
    }
    for xi in integer_box(dim, xi_bound) {
        let p = lattice.point(&xi);
        if bases.iter().any(|onb| distance_to(&p, onb) <= SUBSPACE_TOL) {
            return Ok(Some(xi));
        }
    }
    Ok(None)
}

/// A lattice avoiding the given proper subspaces for all integer coordinates
/// up to `xi_bound`. Without subspaces this is `ℤ^dim`.
pub fn make_lattice(
    dim: usize,
    subspaces: &[Vec<Vec<f64>>],
    xi_bound: i64,
    seed: u64,
) -> Result<LatticeSpec> {
    if !(1..=2).contains(&dim) {
        return Err(Error::Config(format!("lattice dimension must be 1 or 2, got {dim}")));
    }
    if subspaces.is_empty() {
        return Ok(LatticeSpec::integer(dim));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_DRAWS {
        let basis: Vec<Vec<f64>> = (0..dim)
            .map(|_| (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
            .collect();
        if det(&basis).abs() < 0.1 {
            continue;
        }
        let lattice = LatticeSpec::new(basis)?;
        if lattice_meets_subspaces(&lattice, subspaces, xi_bound)?.is_none() {
            return Ok(lattice);
        }
    }
    Err(Error::Generation(format!("no admissible lattice in {MAX_DRAWS} draws")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_is_inverse_transpose() {
        let l = LatticeSpec::new(vec![vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                // (dualᵀ basis)_ij = Σ_k dual[k][i] basis[k][j]
                let v: f64 = (0..2).map(|k| l.dual()[k][i] * l.basis()[k][j]).sum();
                assert!((v - if i == j { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
        assert!(LatticeSpec::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]]).is_err());
    }

    #[test]
    fn trivial_lattice_without_subspaces() {
        assert_eq!(make_lattice(1, &[], 50, 0).unwrap().basis(), &[vec![1.0]]);
    }

    #[test]
    fn integer_basis_meets_axis() {
        let l = LatticeSpec::new(vec![vec![1.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let axis = vec![vec![vec![1.0, 0.0]]];
        let hit = lattice_meets_subspaces(&l, &axis, 5).unwrap().unwrap();
        let p = l.point(&hit);
        assert!(p[1].abs() < 1e-12 && p[0] != 0.0);
    }

    #[test]
    fn random_lattice_avoids_axis() {
        let axis = vec![vec![vec![1.0, 0.0]]];
        let l = make_lattice(2, &axis, 50, 7).unwrap();
        // brute-force the 101² - 1 vectors independently
        for a in -50i64..=50 {
            for b in -50i64..=50 {
                if a == 0 && b == 0 {
                    continue;
                }
                let y = l.basis()[1][0] * a as f64 + l.basis()[1][1] * b as f64;
                assert!(y.abs() > 1e-9, "lattice point on axis at ({a}, {b})");
            }
        }
        assert_eq!(make_lattice(2, &axis, 50, 7).unwrap(), l);
    }

    #[test]
    fn improper_subspace_rejected() {
        let full = vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]];
        assert!(make_lattice(2, &full, 3, 1).is_err());
    }
}
