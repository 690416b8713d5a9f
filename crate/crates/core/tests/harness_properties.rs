use dacd::error::Error;
use dacd::grid::{Boundary, GridFunction, LatticeSpec};
use dacd::harness::{
    burgers_exact, check_example1, random_diagonal_model, run_periodic_decay, run_sandwich_decay, DecaySeries,
    PropertyReport,
};
use dacd::initial::{build_initial, GridSpec, InitialSpec};
use dacd::model::ScalarModel;
use dacd::solver::SolverConfig;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn exact_mass(t: f64) -> f64 {
    let (a, b) = (-1.0, 2.0 + 2.0 * t.sqrt() + t);
    let n = 200_000;
    let h = (b - a) / n as f64;
    (0..n).map(|i| burgers_exact(t, a + (i as f64 + 0.5) * h).unwrap()).sum::<f64>() * h
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn exact_block_solution_keeps_unit_mass(t in 0.0f64..20.0) {
        prop_assert!((exact_mass(t) - 1.0).abs() < 1e-4);
    }

    #[test]
    fn exact_block_solution_is_bounded(t in 0.0f64..20.0, x in -5.0f64..50.0) {
        let v = burgers_exact(t, x).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }

    #[test]
    fn pass_iff_slack_within_tolerance(slack in -1.0f64..1.0, tol in 0.0f64..0.5) {
        let r = PropertyReport::new("p", slack, tol);
        prop_assert_eq!(r.pass, slack >= -tol);
    }

    #[test]
    fn majorant_dominates_and_is_nonincreasing(v in prop::collection::vec(0.0f64..10.0, 1..40)) {
        let m = DecaySeries::majorant(&v);
        prop_assert_eq!(m.len(), v.len());
        for k in 0..v.len() {
            prop_assert!(m[k] >= v[k]);
            if k + 1 < v.len() {
                prop_assert!(m[k] >= m[k + 1]);
            }
        }
        prop_assert_eq!(*m.last().unwrap(), *v.last().unwrap());
    }
}

#[test]
fn example1_floor_sharpens_with_resolution() {
    let mins: Vec<f64> = [500, 1000, 2000]
        .iter()
        .map(|&cells| {
            let out = check_example1(3, (0.0, 20.0), cells, 2.0, 1.0).unwrap();
            out.series.x_norm.iter().cloned().fold(f64::INFINITY, f64::min)
        })
        .collect();
    assert!(mins[0] <= mins[1] + 1e-12 && mins[1] <= mins[2] + 1e-12, "{mins:?}");
}

#[test]
fn example1_without_evolution() {
    let cells = 400;
    let out = check_example1(1, (0.0, 4.0), cells, 0.0, 1.0 - 4.0 / cells as f64).unwrap();
    assert_eq!(out.series.len(), 1);
    assert!(out.series.x_norm[0] >= 1.0 - 4.0 / cells as f64);
    assert!(out.reports.get("x_norm_floor").unwrap().pass);
}

#[test]
fn example1_threshold_above_floor_fails() {
    // a unit-radius window holds at most mass 2
    let out = check_example1(3, (0.0, 20.0), 400, 1.0, 2.5).unwrap();
    assert!(!out.reports.get("x_norm_floor").unwrap().pass);
    assert!(matches!(check_example1(2, (0.0, 20.0), 400, 2.5, 1.0), Err(Error::Config(_))));
}

#[test]
fn example1_series_survives_csv() {
    let out = check_example1(2, (0.0, 10.0), 200, 2.0, 1.0).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("series.csv");
    out.series.write_csv(&path).unwrap();
    let back = DecaySeries::read_csv(&path).unwrap();
    assert_eq!(back.t, out.series.t);
    assert_eq!(back.x_norm, out.series.x_norm);
    assert!(back.t.windows(2).all(|w| w[0] < w[1]));
    assert!(back.x_norm.iter().chain(&back.l1_norm).all(|&v| v >= 0.0));
}

#[test]
fn constant_periodic_data_have_zero_series() {
    let u0 = build_initial(&InitialSpec::Constant { value: 0.3 }, &GridSpec::interval(0.0, 1.0, 64, Boundary::Periodic), None)
        .unwrap();
    let model = ScalarModel::burgers((-1.0, 1.0)).unwrap();
    let out = run_periodic_decay(&u0, &model, &LatticeSpec::integer(1), &SolverConfig::uniform(0.45, 1.0, 4), 0.5, 10)
        .unwrap();
    assert!(out.series.l1_norm.iter().all(|&v| v.abs() < 1e-14));
}

#[test]
fn sandwich_of_zero_data_is_flat() {
    let u0 = GridFunction::interval(-4.0, 4.0, 64, Boundary::FarField(0.0)).unwrap();
    let model = ScalarModel::burgers((-1.0, 1.0)).unwrap();
    let out = run_sandwich_decay(&u0, &model, &LatticeSpec::integer(1), 4.0, &SolverConfig::uniform(0.45, 1.0, 2)).unwrap();
    assert!(out.reports.all_pass(), "{:?}", out.reports);
    assert!(out.series.x_norm.iter().all(|&v| v.abs() < 1e-14));
}

#[test]
fn sandwich_orders_random_models() {
    let mut checked = 0;
    for seed in 0..12u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = random_diagonal_model(&mut rng, 1, (-2.0, 2.0)).unwrap();
        let grid = GridSpec::interval(-8.0, 8.0, 128, Boundary::FarField(0.0));
        let spec = InitialSpec::Bump { center: vec![], radius: 1.0, mass: 0.5 };
        let u0 = build_initial(&spec, &grid, None).unwrap();
        match run_sandwich_decay(&u0, &model, &LatticeSpec::integer(1), 4.0, &SolverConfig::uniform(0.45, 0.5, 2)) {
            Ok(out) => {
                assert!(out.reports.get("sandwich").unwrap().pass, "seed {seed}: {:?}", out.reports);
                assert!(out.reports.get("initial_order").unwrap().pass);
                checked += 1;
            }
            Err(Error::Analysis(_) | Error::Domain(_)) => {}
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
    assert!(checked >= 3, "only {checked} models satisfied the hypotheses");
}
