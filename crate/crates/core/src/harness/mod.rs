//! Checks of qualitative properties and decay behaviour on computed
//! solutions, with CSV/JSON outputs for plotting.

mod burgers;
mod decay;
mod properties;
mod random;

pub use burgers::{burgers_exact, check_example1, example1_initial, scaled_block_solution, Example1Outcome};
pub use decay::{
    influence_interval, run_periodic_decay, run_sandwich_decay, run_whole_space_decay, DecayOutcome,
    SandwichOutcome,
};
pub use properties::{
    check_extremal_convergence, check_pair, check_periodic_coincidence, check_properties, K_PLUS_OFFSET,
};
pub use random::{random_diagonal_model, random_piecewise_constant};

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsutil::write_atomic;
use crate::json::{extended_real, extended_real_de};

/// One named check. `slack` is the signed margin by which the property
/// holds; it passes when `slack ≥ -tolerance`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    pub pass: bool,
    #[serde(serialize_with = "extended_real", deserialize_with = "extended_real_de")]
    pub slack: f64,
    pub tolerance: f64,
    /// Where the worst case occurred, input hashes and similar.
    #[serde(default)]
    pub refs: BTreeMap<String, String>,
}

impl PropertyReport {
    pub fn new(name: impl Into<String>, slack: f64, tolerance: f64) -> Self {
        PropertyReport { name: name.into(), pass: slack >= -tolerance, slack, tolerance, refs: BTreeMap::new() }
    }

    pub fn with_ref(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.refs.insert(key.into(), value.to_string());
        self
    }
}

/// Reports of one harness run together with free-form notes.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ReportSet {
    pub reports: Vec<PropertyReport>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl ReportSet {
    pub fn push(&mut self, r: PropertyReport) {
        self.reports.push(r);
    }

    pub fn extend(&mut self, other: ReportSet) {
        self.reports.extend(other.reports);
        self.notes.extend(other.notes);
    }

    pub fn all_pass(&self) -> bool {
        self.reports.iter().all(|r| r.pass)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyReport> {
        self.reports.iter().find(|r| r.name == name)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_atomic(path, &serde_json::to_vec_pretty(self)?)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        Ok(serde_json::from_slice(&std::fs::read(path)?)?)
    }
}

/// Norm history of a run. Columns `t,x_norm,l1_norm,min,max`, plus
/// `bound_rhs` when a majorant is attached.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DecaySeries {
    pub t: Vec<f64>,
    pub x_norm: Vec<f64>,
    pub l1_norm: Vec<f64>,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
    pub bound_rhs: Option<Vec<f64>>,
}

impl DecaySeries {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn push(&mut self, t: f64, x_norm: f64, l1_norm: f64, min: f64, max: f64) {
        self.t.push(t);
        self.x_norm.push(x_norm);
        self.l1_norm.push(l1_norm);
        self.min.push(min);
        self.max.push(max);
    }

    /// `M(t_k) = max_{j ≥ k} x_k`, the smallest nonincreasing majorant.
    pub fn majorant(values: &[f64]) -> Vec<f64> {
        let mut out = values.to_vec();
        for k in (0..out.len().saturating_sub(1)).rev() {
            out[k] = out[k].max(out[k + 1]);
        }
        out
    }

    /// First time at which the majorant of `values` drops to `level`.
    pub fn crossing_time(&self, values: &[f64], level: f64) -> Option<f64> {
        Self::majorant(values).iter().position(|&m| m <= level).map(|k| self.t[k])
    }

    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header = vec!["t", "x_norm", "l1_norm", "min", "max"];
        if self.bound_rhs.is_some() {
            header.push("bound_rhs");
        }
        w.write_record(&header)?;
        for k in 0..self.len() {
            let mut row = vec![self.t[k], self.x_norm[k], self.l1_norm[k], self.min[k], self.max[k]];
            if let Some(b) = &self.bound_rhs {
                row.push(b[k]);
            }
            w.write_record(row.iter().map(|v| format!("{v}")))?;
        }
        w.into_inner().map_err(|e| Error::Io(e.into_error()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, &self.csv_bytes()?)
    }

    pub fn read_csv(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
        let base = ["t", "x_norm", "l1_norm", "min", "max"];
        let with_bound = match header.len() {
            5 => false,
            6 if header[5] == "bound_rhs" => true,
            _ => return Err(Error::Config(format!("unexpected series header {header:?}"))),
        };
        if header[..5] != base {
            return Err(Error::Config(format!("unexpected series header {header:?}")));
        }
        let mut s = DecaySeries { bound_rhs: with_bound.then(Vec::new), ..Default::default() };
        for rec in r.records() {
            let rec = rec?;
            let v = rec
                .iter()
                .map(|f| f.parse::<f64>().map_err(|_| Error::Config(format!("bad number {f:?} in series"))))
                .collect::<Result<Vec<f64>>>()?;
            if v.len() != header.len() {
                return Err(Error::Config("ragged series row".into()));
            }
            s.push(v[0], v[1], v[2], v[3], v[4]);
            if let Some(b) = &mut s.bound_rhs {
                b.push(v[5]);
            }
        }
        Ok(s)
    }
}
