use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use dacd::fsutil::{sha256_hex, write_atomic};
use dacd::grid::{read_grid_csv, write_grid_csv, Boundary, GridFunction, LatticeSpec};
use dacd::harness::{
    check_example1, check_extremal_convergence, check_pair, check_properties, run_periodic_decay,
    run_sandwich_decay, DecaySeries, PropertyReport, ReportSet,
};
use dacd::initial::{build_initial, GridSpec};
use dacd::model::{check_gn, ModelFile, ScalarModel};
use dacd::solver::{solve, truncation_sequence, value_range, write_trajectory, Trajectory};
use serde::Serialize;

use crate::config::{
    missing, Example1Params, ExperimentConfig, ExtremalParams, Kind, PeriodicDecayParams, PropertiesParams,
    SandwichParams,
};
use crate::failure::Failure;

#[derive(Serialize)]
struct Artifact {
    file: String,
    sha256: String,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    kind: &'static str,
    status: &'static str,
    seed: Option<u64>,
    config: &'a ExperimentConfig,
    inputs: &'a BTreeMap<String, String>,
    artifacts: Vec<Artifact>,
}

pub struct Outcome {
    pub pass: bool,
    pub reports: ReportSet,
}

pub struct Run {
    kind: Kind,
    cfg: ExperimentConfig,
    base: PathBuf,
    out: PathBuf,
    seed: Option<u64>,
    inputs: BTreeMap<String, String>,
    artifacts: BTreeMap<String, String>,
}

impl Run {
    pub fn new(
        kind: Kind,
        config_path: &Path,
        out: Option<PathBuf>,
        seed: Option<u64>,
    ) -> Result<Run, Failure> {
        let bytes = std::fs::read(config_path)
            .map_err(|e| Failure::Validation(format!("cannot read {}: {e}", config_path.display())))?;
        let text = String::from_utf8(bytes.clone()).map_err(|_| Failure::Validation("config is not UTF-8".into()))?;
        let cfg = ExperimentConfig::parse(&text)?;
        if let Some(k) = cfg.kind {
            if k != kind {
                return Err(Failure::Validation(format!(
                    "config is for `{}` but the `{}` subcommand was used",
                    k.name(),
                    kind.name()
                )));
            }
        }
        let base = config_path.parent().map(Path::to_path_buf).unwrap_or_default();
        let out = match out.or_else(|| cfg.output.as_ref().map(|o| cfg.resolve(&base, o))) {
            Some(o) => o,
            None => return Err(Failure::Validation("no output directory: pass --out or set `output`".into())),
        };
        let seed = seed.or(cfg.seed);
        let mut inputs = BTreeMap::new();
        inputs.insert("config".to_string(), sha256_hex(&bytes));
        Ok(Run { kind, cfg, base, out, seed, inputs, artifacts: BTreeMap::new() })
    }

    pub fn out_dir(&self) -> &Path {
        &self.out
    }

    fn read_input(&mut self, key: &str, p: &Path) -> Result<(PathBuf, Vec<u8>), Failure> {
        let path = self.cfg.resolve(&self.base, p);
        let bytes =
            std::fs::read(&path).map_err(|e| Failure::Validation(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.insert(key.to_string(), sha256_hex(&bytes));
        Ok((path, bytes))
    }

    fn model(&mut self) -> Result<ScalarModel, Failure> {
        let p = self.cfg.model.clone().ok_or_else(|| missing("model"))?;
        let (path, bytes) = self.read_input("model", &p)?;
        let text = String::from_utf8(bytes)
            .map_err(|_| Failure::Validation(format!("{} is not UTF-8", path.display())))?;
        Ok(ModelFile::from_json(&text)?.build()?)
    }

    fn initial(&mut self) -> Result<GridFunction, Failure> {
        match (self.cfg.initial.clone(), self.cfg.initial_file.clone()) {
            (Some(_), Some(_)) => Err(Failure::Validation("give either `initial` or `initial_file`, not both".into())),
            (None, Some(p)) => {
                let (path, _) = self.read_input("initial_file", &p)?;
                let sidecar = dacd::grid::sidecar_path(&path);
                self.read_input("initial_file_meta", &sidecar)?;
                Ok(read_grid_csv(&path)?)
            }
            (Some(spec), None) => {
                let grid = self.cfg.grid.as_ref().ok_or_else(|| missing("grid"))?;
                if spec.is_random() && self.seed.is_none() {
                    return Err(Failure::Validation("random initial data need a seed (--seed or `seed`)".into()));
                }
                Ok(build_initial(&spec, grid, self.seed)?)
            }
            (None, None) => Err(missing("initial")),
        }
    }

    fn lattice(&self, given: Option<LatticeSpec>, dim: usize) -> Result<LatticeSpec, Failure> {
        let l = given.unwrap_or_else(|| LatticeSpec::integer(dim));
        if l.dim() != dim {
            return Err(Failure::Validation(format!("lattice dimension {} does not match data dimension {dim}", l.dim())));
        }
        Ok(l)
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<(), Failure> {
        write_atomic(&self.out.join(name), bytes)?;
        self.artifacts.insert(name.to_string(), sha256_hex(bytes));
        Ok(())
    }

    fn record(&mut self, name: &str) -> Result<(), Failure> {
        let bytes = std::fs::read(self.out.join(name)).map_err(|e| Failure::Internal(e.to_string()))?;
        self.artifacts.insert(name.to_string(), sha256_hex(&bytes));
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, v: &T) -> Result<(), Failure> {
        let bytes = serde_json::to_vec_pretty(v).map_err(|e| Failure::Internal(e.to_string()))?;
        self.write(name, &bytes)
    }

    fn write_series(&mut self, name: &str, s: &DecaySeries) -> Result<(), Failure> {
        self.write(name, &s.csv_bytes()?)
    }

    fn write_grid(&mut self, name: &str, g: &GridFunction) -> Result<(), Failure> {
        write_grid_csv(g, &self.out.join(name))?;
        self.record(name)?;
        self.record(&dacd::grid::sidecar_path(Path::new(name)).to_string_lossy())
    }

    fn write_traj(&mut self, t: &Trajectory, prefix: &str) -> Result<(), Failure> {
        std::fs::create_dir_all(&self.out).map_err(|e| Failure::Internal(e.to_string()))?;
        let m = write_trajectory(t, &self.out, prefix)?;
        for s in &m.snapshots {
            self.artifacts.insert(s.file.clone(), s.sha256.clone());
            self.record(&dacd::grid::sidecar_path(Path::new(&s.file)).to_string_lossy())?;
        }
        self.record(&format!("{prefix}trajectory.json"))
    }

    fn finish_reports(&mut self, reports: ReportSet) -> Result<Outcome, Failure> {
        let bytes = serde_json::to_vec_pretty(&reports).map_err(|e| Failure::Internal(e.to_string()))?;
        self.write("reports.json", &bytes)?;
        Ok(Outcome { pass: reports.all_pass(), reports })
    }

    pub fn execute(&mut self) -> Result<Outcome, Failure> {
        let outcome = match self.kind {
            Kind::Solve => self.solve(),
            Kind::Properties => self.properties(),
            Kind::GnCheck => self.gn_check(),
            Kind::PeriodicDecay => self.periodic_decay(),
            Kind::Sandwich => self.sandwich(),
            Kind::Example1 => self.example1(),
            Kind::Extremal => self.extremal(),
        }?;
        let manifest = Manifest {
            tool: "dacd",
            version: env!("CARGO_PKG_VERSION"),
            kind: self.kind.name(),
            status: if outcome.pass { "pass" } else { "fail" },
            seed: self.seed,
            config: &self.cfg,
            inputs: &self.inputs,
            artifacts: self.artifacts.iter().map(|(f, h)| Artifact { file: f.clone(), sha256: h.clone() }).collect(),
        };
        let bytes = serde_json::to_vec_pretty(&manifest).map_err(|e| Failure::Internal(e.to_string()))?;
        write_atomic(&self.out.join("manifest.json"), &bytes)?;
        Ok(outcome)
    }

    fn solve(&mut self) -> Result<Outcome, Failure> {
        let model = self.model()?;
        let u0 = self.initial()?;
        let cfg = self.cfg.require_solver()?.clone();
        let traj = solve(&u0, &model, &cfg)?;
        self.write_traj(&traj, "")?;
        Ok(Outcome { pass: true, reports: ReportSet::default() })
    }

    fn properties(&mut self) -> Result<Outcome, Failure> {
        let params: PropertiesParams = self.cfg.params()?;
        let model = self.model()?;
        let u0 = self.initial()?;
        let mut cfg = self.cfg.require_solver()?.clone();
        let Some(spec) = params.perturbation else {
            let traj = solve(&u0, &model, &cfg)?;
            self.write_traj(&traj, "")?;
            return self.finish_reports(check_properties(&traj));
        };
        let like = match u0.bc() {
            Boundary::Periodic => u0.clone(),
            Boundary::FarField(_) => u0.with_bc(Boundary::FarField(0.0))?,
        };
        let ext = like.extent();
        let grid = GridSpec {
            lo: ext.iter().map(|e| e.0).collect(),
            hi: ext.iter().map(|e| e.1).collect(),
            cells: like.shape()[..like.dim()].to_vec(),
            bc: like.bc(),
        };
        let p = build_initial(&spec, &grid, self.seed)?;
        if p.min() < 0.0 {
            return Err(Failure::Validation("the perturbation must be nonnegative".into()));
        }
        let v0 = u0.with_values(u0.values().iter().zip(p.values()).map(|(a, b)| a + b).collect())?;
        if cfg.bound_range.is_none() {
            let (lo, _) = value_range(&u0);
            let (_, hi) = value_range(&v0);
            cfg.bound_range = Some((lo, hi));
        }
        let u = solve(&u0, &model, &cfg)?;
        let v = solve(&v0, &model, &cfg)?;
        self.write_traj(&u, "")?;
        self.write_traj(&v, "perturbed_")?;
        let mut reports = check_properties(&u);
        reports.extend(check_pair(&u, &v)?);
        self.finish_reports(reports)
    }

    fn gn_check(&mut self) -> Result<Outcome, Failure> {
        let model = self.model()?;
        let gn = check_gn(&model);
        self.write_json("gn.json", &gn)?;
        let mut report = match gn.witness {
            Some((a, b)) => PropertyReport::new("gn_condition", -(b - a), 0.0).with_ref("witness", format!("[{a}, {b}]")),
            None => PropertyReport::new("gn_condition", 0.0, 0.0),
        };
        report = report.with_ref("sup_f_minus", gn.sup_f_minus).with_ref("inf_f_plus", gn.inf_f_plus);
        let mut reports = ReportSet::default();
        reports.push(report);
        self.finish_reports(reports)
    }

    fn periodic_decay(&mut self) -> Result<Outcome, Failure> {
        let params: PeriodicDecayParams = self.cfg.params()?;
        let model = self.model()?;
        let u0 = self.initial()?;
        let cfg = self.cfg.require_solver()?.clone();
        let lattice = self.lattice(params.lattice, u0.dim())?;
        let out = run_periodic_decay(&u0, &model, &lattice, &cfg, params.fraction, params.xi_bound)?;
        self.write_traj(&out.trajectory, "")?;
        self.write_series("series.csv", &out.series)?;
        if let Some(h) = &out.hypothesis {
            self.write_json("hypothesis.json", h)?;
        }
        self.finish_reports(out.reports)
    }

    fn sandwich(&mut self) -> Result<Outcome, Failure> {
        let params: SandwichParams = self.cfg.params()?;
        let model = self.model()?;
        let u0 = self.initial()?;
        let cfg = self.cfg.require_solver()?.clone();
        let lattice = self.lattice(params.lattice, u0.dim())?;
        let out = run_sandwich_decay(&u0, &model, &lattice, params.r, &cfg)?;
        self.write_traj(&out.middle, "")?;
        self.write_traj(&out.lower, "lower_")?;
        self.write_traj(&out.upper, "upper_")?;
        self.write_series("series.csv", &out.series)?;
        self.write_series("series_lower.csv", &out.series_lower)?;
        self.write_series("series_upper.csv", &out.series_upper)?;
        #[derive(Serialize)]
        struct Summary<'a> {
            r: f64,
            m_minus: f64,
            m_plus: f64,
            b_minus: f64,
            b_plus: f64,
            window_measure: f64,
            gn: &'a dacd::model::GnReport,
        }
        let summary = Summary {
            r: out.r,
            m_minus: out.m_minus,
            m_plus: out.m_plus,
            b_minus: out.b_minus,
            b_plus: out.b_plus,
            window_measure: out.window_measure,
            gn: &out.gn,
        };
        self.write_json("sandwich.json", &summary)?;
        self.finish_reports(out.reports)
    }

    fn example1(&mut self) -> Result<Outcome, Failure> {
        let p: Example1Params = self.cfg.params()?;
        let grid = self.cfg.grid.clone().ok_or_else(|| missing("grid"))?;
        if grid.dim() != 1 {
            return Err(Failure::Validation("example1 runs on a one-dimensional grid".into()));
        }
        grid.cell_size()?;
        let out = check_example1(p.n_blocks, (grid.lo[0], grid.hi[0]), grid.cells[0], p.t_max, p.threshold)?;
        self.write_traj(&out.trajectory, "")?;
        self.write_series("series.csv", &out.series)?;
        self.finish_reports(out.reports)
    }

    fn extremal(&mut self) -> Result<Outcome, Failure> {
        let p: ExtremalParams = self.cfg.params()?;
        let model = self.model()?;
        let u0 = self.initial()?;
        let cfg = self.cfg.require_solver()?.clone();
        let runs = truncation_sequence(&u0, &model, &cfg, &p.levels, &p.radii)?;
        for (k, t) in runs.iter().enumerate() {
            self.write_grid(&format!("run_{k:02}.csv"), t.last())?;
        }
        self.finish_reports(check_extremal_convergence(&runs, p.inner)?)
    }
}
