//! Seeded random models and data for the property suites.

use rand::Rng;

use crate::error::Result;
use crate::grid::{Boundary, GridFunction};
use crate::model::{PiecewisePoly, Poly, ScalarModel};

fn sorted_cuts(rng: &mut impl Rng, lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let mut c: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

/// Continuous piecewise quadratic flux components and a diagonal diffusion
/// with piecewise constant entries in `[0, 0.5]`, some pieces zero.
pub fn random_diagonal_model(rng: &mut impl Rng, dim: usize, urange: (f64, f64)) -> Result<ScalarModel> {
    let (lo, hi) = urange;
    let mut flux = Vec::with_capacity(dim);
    for _ in 0..dim {
        let mut bps = vec![lo];
        bps.extend(sorted_cuts(rng, lo, hi, 2));
        bps.push(hi);
        let mut pieces = vec![Poly::new(vec![0.0, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)])];
        for &b in &bps[1..bps.len() - 1] {
            let v = pieces[pieces.len() - 1].eval(b);
            let (c1, c2) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            // v + c1 (u - b) + c2 (u - b)² in powers of u
            pieces.push(Poly::new(vec![v - c1 * b + c2 * b * b, c1 - 2.0 * c2 * b, c2]));
        }
        flux.push(PiecewisePoly::continuous(bps, pieces)?);
    }
    let mut diffusion = vec![vec![PiecewisePoly::constant(0.0, lo, hi)?; dim]; dim];
    for (axis, row) in diffusion.iter_mut().enumerate() {
        let mut bps = vec![lo];
        bps.extend(sorted_cuts(rng, lo, hi, 3));
        bps.push(hi);
        let pieces = (1..bps.len())
            .map(|_| Poly::constant(if rng.gen_bool(0.4) { 0.0 } else { rng.gen_range(0.0..0.5) }))
            .collect();
        row[axis] = PiecewisePoly::new(bps, pieces)?;
    }
    ScalarModel::new(flux, diffusion, urange)
}

/// Piecewise constant data with `pieces` random levels per axis in
/// `[lo, hi]` on the geometry of `like`. Far-field grids keep the far-field
/// value on the outer fifth of the box on every side.
pub fn random_piecewise_constant(
    rng: &mut impl Rng,
    like: &GridFunction,
    pieces: usize,
    lo: f64,
    hi: f64,
) -> Result<GridFunction> {
    let dim = like.dim();
    let ext = like.extent();
    let inner: Vec<(f64, f64)> = match like.far_field() {
        Some(_) => ext.iter().map(|&(a, b)| (a + 0.2 * (b - a), b - 0.2 * (b - a))).collect(),
        None => ext.clone(),
    };
    let cuts: Vec<Vec<f64>> =
        inner.iter().map(|&(a, b)| sorted_cuts(rng, a, b, pieces.saturating_sub(1))).collect();
    let levels: Vec<f64> = (0..pieces.max(1).pow(dim as u32)).map(|_| rng.gen_range(lo..=hi)).collect();
    let stride = pieces.max(1);
    let mut values = Vec::with_capacity(like.len());
    for j in 0..like.ny() {
        for i in 0..like.nx() {
            let c = like.center(i, j);
            let outside = (0..dim).any(|a| c[a] < inner[a].0 || c[a] > inner[a].1);
            let v = match (like.bc(), outside) {
                (Boundary::FarField(f), true) => f,
                _ => {
                    let mut idx = 0;
                    for a in (0..dim).rev() {
                        idx = idx * stride + cuts[a].partition_point(|&x| x <= c[a]);
                    }
                    levels[idx]
                }
            };
            values.push(v);
        }
    }
    like.with_values(values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_models_are_valid_and_seeded() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let m = random_diagonal_model(&mut rng, 1 + (seed as usize % 2), (-1.0, 1.0)).unwrap();
            assert!(m.is_diagonal());
            for f in m.flux() {
                assert!(f.is_continuous());
            }
            for u in m.sample_points(64) {
                let a = m.diffusion_at(u);
                for (i, row) in a.iter().enumerate() {
                    assert!((0.0..=0.5).contains(&row[i]));
                }
            }
            let mut again = ChaCha8Rng::seed_from_u64(seed);
            let m2 = random_diagonal_model(&mut again, 1 + (seed as usize % 2), (-1.0, 1.0)).unwrap();
            assert_eq!(m.flux_at(0.3), m2.flux_at(0.3));
        }
    }

    #[test]
    fn far_field_margin_is_kept() {
        let like = GridFunction::interval(-5.0, 5.0, 100, Boundary::FarField(0.25)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = random_piecewise_constant(&mut rng, &like, 4, -0.5, 0.5).unwrap();
        assert_eq!(g.values()[0], 0.25);
        assert_eq!(g.values()[99], 0.25);
        assert!(g.values().iter().all(|v| (-0.5..=0.5).contains(v)));
    }
}
