use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::hypgeom::io::encode_pgm;
use crate::hypgeom::GraphGrid;
use crate::solver::Stage;

/// Writes `bytes` to a sibling temp file and renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| Error::Validation(format!("{} has no file name", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(".tmp");
    let tmp = path.with_file_name(tmp_name);
    let write = || -> std::io::Result<()> {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Binary PGM heatmap of a per-node field; see [`encode_pgm`].
pub fn emit_heatmap(field: &[Option<f64>], grid: &GraphGrid, path: &Path) -> Result<()> {
    if field.len() != grid.len() {
        return Err(Error::Validation(format!(
            "field has {} values for {} nodes",
            field.len(),
            grid.len()
        )));
    }
    if let Some(i) = (0..grid.len()).find(|&i| grid.is_masked(i) && field[i].is_some_and(|v| !v.is_finite())) {
        return Err(Error::Validation(format!("field is not finite at node {i}")));
    }
    write_atomic(path, &encode_pgm(grid, field))
}

/// Output directory that records the files written into it.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    artifacts: Vec<String>,
}

impl OutputDir {
    pub fn create(dir: &Path) -> Result<Self> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            artifacts: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        write_atomic(&self.path(name), bytes)?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn heatmap(&mut self, name: &str, field: &[Option<f64>], grid: &GraphGrid) -> Result<()> {
        emit_heatmap(field, grid, &self.path(name))?;
        self.artifacts.push(name.to_string());
        Ok(())
    }

    pub fn artifacts(&self) -> &[String] {
        &self.artifacts
    }
}

/// Interior curvature may grow by at most this factor over a continuation
/// for the run to count as bounded.
pub const BOUNDED_FACTOR: f64 = 10.0;

/// Aggregate view of a sequence of solver stages.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema: u32,
    pub config_hash: String,
    pub stages: usize,
    pub all_converged: bool,
    /// Indices of stages that did not converge.
    pub failed_stages: Vec<usize>,
    pub epsilon: Vec<f64>,
    pub sigma: Vec<f64>,
    pub epsilon_decreasing: bool,
    pub iterations: Vec<usize>,
    pub final_residual: Vec<f64>,
    pub interior_kappa_max: Vec<f64>,
    /// `interior_kappa_max[k] / interior_kappa_max[0]`.
    pub kappa_growth: Vec<f64>,
    /// Interior over boundary-ring curvature, per stage.
    pub ratio_r: Vec<f64>,
    pub min_sigma_n: Vec<f64>,
    /// Every stage converged with growth at most [`BOUNDED_FACTOR`].
    pub bounded_r: bool,
    /// Per stage, the Q maxima for each configured `N`.
    pub q_max: Vec<Vec<Option<f64>>>,
}

pub fn summarize(stages: &[Stage], config_hash: &str) -> Result<Summary> {
    if stages.is_empty() {
        return Err(Error::Validation("cannot summarize an empty list of reports".into()));
    }
    let kappa: Vec<f64> = stages
        .iter()
        .map(|s| s.report.estimate.as_ref().map_or(f64::NAN, |e| e.kappa_stats.interior_max_abs))
        .collect();
    let failed_stages: Vec<usize> = stages
        .iter()
        .enumerate()
        .filter(|(_, s)| !s.report.converged)
        .map(|(k, _)| k)
        .collect();
    let kappa_growth: Vec<f64> = kappa.iter().map(|k| k / kappa[0]).collect();
    let epsilon: Vec<f64> = stages.iter().map(|s| s.epsilon).collect();
    Ok(Summary {
        schema: 1,
        config_hash: config_hash.to_string(),
        stages: stages.len(),
        all_converged: failed_stages.is_empty(),
        epsilon_decreasing: epsilon.windows(2).all(|w| w[1] < w[0]),
        epsilon,
        sigma: stages.iter().map(|s| s.sigma).collect(),
        iterations: stages.iter().map(|s| s.report.iterations).collect(),
        final_residual: stages.iter().map(|s| s.report.final_residual).collect(),
        bounded_r: failed_stages.is_empty() && kappa_growth.iter().all(|g| *g <= BOUNDED_FACTOR),
        failed_stages,
        interior_kappa_max: kappa,
        kappa_growth,
        ratio_r: stages
            .iter()
            .map(|s| s.report.estimate.as_ref().map_or(f64::NAN, |e| e.kappa_stats.ratio_r))
            .collect(),
        min_sigma_n: stages
            .iter()
            .map(|s| s.report.estimate.as_ref().map_or(f64::NAN, |e| e.kappa_stats.min_sigma_n))
            .collect(),
        q_max: stages
            .iter()
            .map(|s| s.report.estimate.as_ref().map_or(Vec::new(), |e| e.q_field.iter().map(|q| q.max_value).collect()))
            .collect(),
    })
}
