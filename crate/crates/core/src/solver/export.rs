use std::path::Path;

use serde::Serialize;

use super::{SolverConfig, Trajectory};
use crate::error::Result;
use crate::fsutil::{sha256_hex, write_atomic};
use crate::grid::{grid_csv_bytes, write_grid_csv};

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotEntry {
    pub t: f64,
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrajectoryManifest {
    pub model_hash: String,
    pub config: Option<SolverConfig>,
    pub scheme: String,
    pub monotone: bool,
    pub snapshots: Vec<SnapshotEntry>,
    pub steps: Vec<f64>,
}

/// One CSV per snapshot (initial state as `snap_0000.csv`) and
/// `trajectory.json` describing them.
pub fn write_trajectory(traj: &Trajectory, dir: &Path, prefix: &str) -> Result<TrajectoryManifest> {
    let mut entries = Vec::new();
    for (k, (t, g)) in traj.states().into_iter().enumerate() {
        let file = format!("{prefix}snap_{k:04}.csv");
        write_grid_csv(g, &dir.join(&file))?;
        entries.push(SnapshotEntry { t, file, sha256: sha256_hex(&grid_csv_bytes(g)?) });
    }
    let manifest = TrajectoryManifest {
        model_hash: traj.model_hash.clone(),
        config: traj.config.clone(),
        scheme: "lax-friedrichs/centered-diffusion, forward euler".into(),
        monotone: traj.monotone,
        snapshots: entries,
        steps: traj.steps.clone(),
    };
    write_atomic(&dir.join(format!("{prefix}trajectory.json")), &serde_json::to_vec_pretty(&manifest)?)?;
    Ok(manifest)
}
