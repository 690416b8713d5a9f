use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use dacd::grid::read_grid_csv;
use dacd::harness::{DecaySeries, ReportSet};

const BURGERS: &str = r#"{"dim": 1, "urange": [-2, 2],
  "flux": [{"breakpoints": [-2, 2], "pieces": [[0, 0, "1/2"]]}],
  "diffusion": [{"breakpoints": [-2, 2], "pieces": [[0]]}]}"#;

const AFFINE: &str = r#"{"dim": 1, "urange": [-1, 1],
  "flux": [{"breakpoints": [-1, 1], "pieces": [[0, 1]]}],
  "diffusion": [{"breakpoints": [-1, 1], "pieces": [[0]]}]}"#;

fn dacd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dacd")).args(args).output().unwrap()
}

fn setup(dir: &Path, config: &str) -> PathBuf {
    std::fs::write(dir.join("burgers.json"), BURGERS).unwrap();
    std::fs::write(dir.join("affine.json"), AFFINE).unwrap();
    let p = dir.join("config.json");
    std::fs::write(&p, config).unwrap();
    p
}

fn run(kind: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![kind, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--quiet"];
    args.extend_from_slice(extra);
    dacd(&args)
}

const SOLVE: &str = r#"{"schema": "dacd.experiment/1", "kind": "solve", "model": "burgers.json",
  "initial": {"family": "constant", "value": 0.25},
  "grid": {"lo": [0], "hi": [1], "cells": [32], "bc": "periodic"},
  "solver": {"cfl": 0.45, "t_end": 0.5, "snapshot_times": [0.25, 0.5]}}"#;

#[test]
fn affine_model_fails_the_nondegeneracy_check() {
    let d = tempfile::tempdir().unwrap();
    let c = setup(d.path(), r#"{"schema": "dacd.experiment/1", "model": "affine.json"}"#);
    let out = d.path().join("out");
    let o = run("gn-check", &c, &out, &[]);
    assert_eq!(o.status.code(), Some(1));
    let reports = ReportSet::read_json(&out.join("reports.json")).unwrap();
    let r = reports.get("gn_condition").unwrap();
    assert!(!r.pass);
    assert!(r.refs.contains_key("witness"));

    let ok = run("gn-check", &setup(d.path(), r#"{"schema": "dacd.experiment/1", "model": "burgers.json"}"#), &out, &[]);
    assert_eq!(ok.status.code(), Some(0));
}

#[test]
fn constant_data_stay_constant() {
    let d = tempfile::tempdir().unwrap();
    let c = setup(d.path(), SOLVE);
    let out = d.path().join("out");
    let o = run("solve", &c, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for k in 0..3 {
        let g = read_grid_csv(&out.join(format!("snap_{k:04}.csv"))).unwrap();
        assert!(g.values().iter().all(|&v| v == 0.25));
    }
}

#[test]
fn example1_run_writes_a_series() {
    let d = tempfile::tempdir().unwrap();
    let c = setup(
        d.path(),
        r#"{"schema": "dacd.experiment/1", "kind": "example1",
            "grid": {"lo": [0], "hi": [24], "cells": [600], "bc": {"far_field": 0.0}},
            "params": {"n_blocks": 3, "t_max": 3.0}}"#,
    );
    let out = d.path().join("out");
    let o = run("example1", &c, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let s = DecaySeries::read_csv(&out.join("series.csv")).unwrap();
    assert!((s.t.last().unwrap() - 3.0).abs() < 1e-12);
    assert!(s.x_norm.iter().all(|&v| v >= 1.0));
}

#[test]
fn identical_runs_give_identical_manifests() {
    let d = tempfile::tempdir().unwrap();
    let c = setup(
        d.path(),
        r#"{"schema": "dacd.experiment/1", "kind": "properties", "model": "burgers.json",
            "initial": {"family": "random", "pieces": 5, "lo": -1, "hi": 1},
            "grid": {"lo": [-8], "hi": [8], "cells": [128], "bc": {"far_field": 0.0}},
            "solver": {"cfl": 0.45, "t_end": 0.5, "snapshot_times": [0.25, 0.5]},
            "params": {"perturbation": {"family": "bump", "radius": 1.0, "mass": 0.3}}}"#,
    );
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    assert_eq!(run("properties", &c, &a, &["--seed", "7"]).status.code(), Some(0));
    assert_eq!(run("properties", &c, &b, &["--seed", "7"]).status.code(), Some(0));
    let ma = std::fs::read(a.join("manifest.json")).unwrap();
    assert_eq!(ma, std::fs::read(b.join("manifest.json")).unwrap());

    // every grid CSV named in the manifest re-parses
    let m: serde_json::Value = serde_json::from_slice(&ma).unwrap();
    let mut grids = 0;
    for art in m["artifacts"].as_array().unwrap() {
        let f = art["file"].as_str().unwrap();
        if f.ends_with(".csv") {
            read_grid_csv(&a.join(f)).unwrap();
            grids += 1;
        }
    }
    assert!(grids >= 6);

    let c2 = run("properties", &c, &d.path().join("c"), &["--seed", "8"]);
    assert_eq!(c2.status.code(), Some(0));
    assert_ne!(ma, std::fs::read(d.path().join("c/manifest.json")).unwrap());
}

#[test]
fn random_data_without_a_seed_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let c = setup(
        d.path(),
        r#"{"schema": "dacd.experiment/1", "model": "burgers.json",
            "initial": {"family": "random", "pieces": 3, "lo": 0, "hi": 1},
            "grid": {"lo": [0], "hi": [1], "cells": [16], "bc": "periodic"},
            "solver": {"cfl": 0.45, "t_end": 0.1}}"#,
    );
    assert_eq!(run("solve", &c, &d.path().join("o"), &[]).status.code(), Some(2));
}

#[test]
fn malformed_configs_exit_with_status_two() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("o");
    let cases = [
        SOLVE.replace("\"kind\": \"solve\",", "\"kind\": \"solve\", \"colour\": 1,"),
        SOLVE.replace("dacd.experiment/1", "dacd.experiment/99"),
        SOLVE.replace("\"constant\", \"value\": 0.25", "\"gaussian\""),
        SOLVE.replace("burgers.json", "missing.json"),
        SOLVE.replace("\"kind\": \"solve\"", "\"kind\": \"sandwich\""),
    ];
    for cfg in cases {
        let c = setup(d.path(), &cfg);
        let o = run("solve", &c, &out, &[]);
        assert_eq!(o.status.code(), Some(2), "{cfg}");
        assert!(!o.stderr.is_empty());
    }
    let c = setup(d.path(), SOLVE);
    assert_eq!(dacd(&["solve", "--config", c.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn snapshot_file_as_initial_data() {
    let d = tempfile::tempdir().unwrap();
    let c = setup(d.path(), SOLVE);
    let first = d.path().join("first");
    assert_eq!(run("solve", &c, &first, &[]).status.code(), Some(0));
    let cfg = format!(
        r#"{{"schema": "dacd.experiment/1", "model": "burgers.json", "initial_file": "{}",
            "solver": {{"cfl": 0.45, "t_end": 0.1}}}}"#,
        first.join("snap_0002.csv").display()
    );
    let c2 = setup(d.path(), &cfg);
    let second = d.path().join("second");
    assert_eq!(run("solve", &c2, &second, &[]).status.code(), Some(0));
    let m: serde_json::Value = serde_json::from_slice(&std::fs::read(second.join("manifest.json")).unwrap()).unwrap();
    assert!(m["inputs"]["initial_file"].is_string());
}
