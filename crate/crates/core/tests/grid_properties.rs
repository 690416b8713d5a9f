use dacd::grid::{
    covering_constants, periodize_inf, periodize_sup, read_grid_csv, shift_mean, v_norm, write_grid_csv, x_norm,
    Boundary, GridFunction, LatticeSpec,
};
use proptest::prelude::*;

fn cell_size() -> impl Strategy<Value = f64> {
    prop::sample::select(vec![0.25, 0.125, 0.0625])
}

fn bc() -> impl Strategy<Value = Boundary> {
    prop_oneof![Just(Boundary::Periodic), (-1.0f64..1.0).prop_map(Boundary::FarField)]
}

fn grid_1d(h: f64, bc: Boundary, values: Vec<f64>) -> GridFunction {
    GridFunction::new(1, &[-4.0], h, &[values.len()], values, bc).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn window_norms_are_equivalent_1d(h in cell_size(), bc in bc(), seed_vals in prop::collection::vec(-2.0f64..2.0, 128)) {
        let n = (8.0 / h) as usize;
        let vals: Vec<f64> = (0..n).map(|i| seed_vals[i % seed_vals.len()] * ((i / 3) % 2) as f64).collect();
        let g = grid_1d(h, bc, vals);
        let (m1, m2) = covering_constants(1);
        let x = x_norm(&g, 1.0).unwrap();
        let v = v_norm(&g, &[1.0]).unwrap();
        prop_assert!(v <= m1 * x * (1.0 + 1e-12) + 1e-15);
        prop_assert!(x <= m2 * v * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn window_norms_are_equivalent_2d(h in prop::sample::select(vec![0.25, 0.125]), bc in bc(),
                                      vals in prop::collection::vec(-2.0f64..2.0, 32 * 32)) {
        let g = GridFunction::new(2, &[-2.0, -2.0], h, &[32, 32], vals, bc).unwrap();
        let (m1, m2) = covering_constants(2);
        let x = x_norm(&g, 1.0).unwrap();
        let v = v_norm(&g, &[1.0, 1.0]).unwrap();
        prop_assert!(v <= m1 * x * (1.0 + 1e-12));
        prop_assert!(x <= m2 * v * (1.0 + 1e-12));
    }

    #[test]
    fn periodic_x_norm_is_shift_invariant(vals in prop::collection::vec(-3.0f64..3.0, 40), k in 0usize..40) {
        let g = GridFunction::new(1, &[0.0], 0.125, &[40], vals.clone(), Boundary::Periodic).unwrap();
        let mut shifted = vals.clone();
        shifted.rotate_left(k);
        let s = g.with_values(shifted).unwrap();
        prop_assert!((x_norm(&g, 1.0).unwrap() - x_norm(&s, 1.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn periodic_x_norm_is_shift_invariant_2d(vals in prop::collection::vec(-3.0f64..3.0, 24 * 24), kx in 0usize..24, ky in 0usize..24) {
        let g = GridFunction::new(2, &[0.0, 0.0], 0.25, &[24, 24], vals.clone(), Boundary::Periodic).unwrap();
        let shifted: Vec<f64> = (0..24 * 24).map(|idx| {
            let (i, j) = (idx % 24, idx / 24);
            vals[((j + ky) % 24) * 24 + (i + kx) % 24]
        }).collect();
        let s = g.with_values(shifted).unwrap();
        prop_assert!((x_norm(&g, 1.0).unwrap() - x_norm(&s, 1.0).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn periodizations_bracket_the_data(vals in prop::collection::vec(-1.0f64..1.0, 16), r in prop::sample::select(vec![3.0, 4.0, 6.0])) {
        let mut all = vec![0.0; 64];
        all[24..40].copy_from_slice(&vals);
        let u0 = GridFunction::new(1, &[-4.0], 0.125, &[64], all, Boundary::FarField(0.0)).unwrap();
        let lat = LatticeSpec::integer(1);
        let sup = periodize_sup(&u0, &lat, r).unwrap();
        let inf = periodize_inf(&u0, &lat, r).unwrap();
        for i in 0..64 {
            let v = u0.get(i, 0);
            prop_assert!(sup.grid.value_at(i as isize, 0) >= v);
            prop_assert!(inf.grid.value_at(i as isize, 0) <= v);
        }
        let shifted = shift_mean(&sup.grid, 0.25).unwrap();
        prop_assert!((shifted.mean() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact(vals in prop::collection::vec(-1e3f64..1e3, 1..50), bc in bc()) {
        let g = GridFunction::new(1, &[-0.3], 0.1, &[vals.len()], vals, bc).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.csv");
        write_grid_csv(&g, &p).unwrap();
        prop_assert_eq!(read_grid_csv(&p).unwrap(), g);
    }
}

#[test]
fn periodized_mean_halves_as_r_doubles() {
    let u0 = GridFunction::sample(1, &[-4.0], 1.0 / 16.0, &[128], Boundary::FarField(0.0), 4, |x| {
        (1.0 - x[0] * x[0]).max(0.0)
    })
    .unwrap();
    let means: Vec<f64> = [4.0, 8.0, 16.0, 32.0]
        .iter()
        .map(|&r| periodize_sup(&u0, &LatticeSpec::integer(1), r).unwrap().grid.mean())
        .collect();
    for w in means.windows(2) {
        assert!(w[1] <= 0.6 * w[0], "{means:?}");
    }
}

#[test]
fn periodized_mean_decays_for_a_skew_lattice() {
    let u0 = GridFunction::sample(2, &[-2.0, -2.0], 0.125, &[32, 32], Boundary::FarField(0.0), 2, |x| {
        (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0)
    })
    .unwrap();
    let lat = LatticeSpec::new(vec![vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
    let means: Vec<f64> =
        [2.0, 4.0, 8.0].iter().map(|&r| periodize_sup(&u0, &lat, r).unwrap().grid.mean()).collect();
    for w in means.windows(2) {
        assert!(w[1] <= 0.6 * w[0], "{means:?}");
    }
}
