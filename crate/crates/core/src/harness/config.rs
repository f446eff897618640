use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeom::{Domain, SurfaceKind};
use crate::inequality_lab::ConcavityOptions;
use crate::solver::{PlateauProblem, SolverConfig};
use crate::symfun::SumHessianParams;

/// Parsed run configuration. Every section is optional in the file; each
/// command checks the sections it needs before doing any work.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub domain: Option<DomainSection>,
    pub operator: Option<OperatorSection>,
    pub boundary: Option<BoundarySection>,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub report: ReportSection,
    #[serde(default)]
    pub lemmas: LemmaSection,
    #[serde(default)]
    pub concavity: ConcavitySection,
    pub surface: Option<SurfaceSection>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub h: f64,
    pub shape: Domain,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSection {
    pub n: usize,
    pub alpha: f64,
    pub sigma: f64,
    #[serde(default)]
    pub lower_bound_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundarySection {
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportSection {
    #[serde(alias = "N_list")]
    pub n_list: Vec<f64>,
    pub heatmaps: bool,
    pub grid_csv: bool,
    pub grid_binary: bool,
    pub curvature_csv: bool,
    /// Binary grid read by `curvature-report`, relative to the config file.
    pub input: Option<PathBuf>,
}

impl Default for ReportSection {
    fn default() -> Self {
        Self {
            n_list: vec![2.0, 10.0, 50.0],
            heatmaps: true,
            grid_csv: true,
            grid_binary: true,
            curvature_csv: true,
            input: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaSection {
    pub identity_samples: usize,
    pub identity_dims: Vec<usize>,
    pub identity_alphas: Vec<f64>,
    pub identity_tol: f64,
    pub liren_samples: usize,
    pub liren_n: usize,
    pub liren_alpha: f64,
    pub liren_gap: f64,
    pub liren_tol: f64,
    pub theta_samples: usize,
    pub theta_n: usize,
    pub theta_alphas: Vec<f64>,
    pub floor_samples: usize,
    pub floor_n: usize,
    pub floor_alphas: Vec<f64>,
    /// Sampling box for the floor scan; `None` uses `[−2/α − 1, 5]`.
    pub floor_interval: Option<[f64; 2]>,
}

impl Default for LemmaSection {
    fn default() -> Self {
        Self {
            identity_samples: 1000,
            identity_dims: vec![2, 3, 4],
            identity_alphas: vec![0.5, 1.0, 2.0],
            identity_tol: 1e-10,
            liren_samples: 1000,
            liren_n: 3,
            liren_alpha: 1.0,
            liren_gap: 0.1,
            liren_tol: 1e-5,
            theta_samples: 100_000,
            theta_n: 3,
            theta_alphas: vec![1.0],
            floor_samples: 10_000,
            floor_n: 3,
            floor_alphas: vec![0.5, 1.0, 2.0],
            floor_interval: None,
        }
    }
}

impl LemmaSection {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("identity_samples", self.identity_samples),
            ("liren_samples", self.liren_samples),
            ("theta_samples", self.theta_samples),
            ("floor_samples", self.floor_samples),
        ];
        for (name, c) in counts {
            if c == 0 {
                return Err(Error::Validation(format!("lemmas.{name} must be positive")));
            }
        }
        for &n in self.identity_dims.iter().chain([&self.liren_n, &self.theta_n, &self.floor_n]) {
            SumHessianParams::new(n, 1.0, 1.0).map_err(validation)?;
        }
        for &a in self.identity_alphas.iter().chain(&self.theta_alphas).chain([&self.liren_alpha]) {
            if !(a.is_finite() && a >= 0.0) {
                return Err(Error::Validation(format!("lemma alpha must be >= 0, got {a}")));
            }
        }
        if self.floor_alphas.iter().any(|a| !(a.is_finite() && *a > 0.0)) {
            return Err(Error::Validation("lemmas.floor_alphas must be > 0".into()));
        }
        for (name, t) in [
            ("identity_tol", self.identity_tol),
            ("liren_tol", self.liren_tol),
            ("liren_gap", self.liren_gap),
        ] {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::Validation(format!("lemmas.{name} must be > 0, got {t}")));
            }
        }
        if let Some([lo, hi]) = self.floor_interval {
            if !(lo < hi) {
                return Err(Error::Validation(format!("invalid floor interval [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConcavitySection {
    pub n: usize,
    pub alpha: f64,
    pub eps_list: Vec<f64>,
    pub samples: usize,
    pub search: ConcavityOptions,
}

impl Default for ConcavitySection {
    fn default() -> Self {
        Self {
            n: 3,
            alpha: 1.0,
            eps_list: vec![0.1, 10.0],
            samples: 100_000,
            search: ConcavityOptions::default(),
        }
    }
}

impl ConcavitySection {
    pub fn validate(&self) -> Result<()> {
        SumHessianParams::new(self.n, self.alpha, 1.0).map_err(validation)?;
        if self.samples == 0 || self.eps_list.is_empty() {
            return Err(Error::Validation("concavity needs samples > 0 and a non-empty eps_list".into()));
        }
        if self.eps_list.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
            return Err(Error::Validation("concavity eps values must be > 0".into()));
        }
        self.search.validate().map_err(validation)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceSection {
    pub dim: usize,
    pub domain: Domain,
    pub h_list: Vec<f64>,
    pub surface: SurfaceKind,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_floor")]
    pub eps_floor: f64,
    #[serde(default = "default_umbilic_tol")]
    pub umbilic_tol: f64,
}

fn default_alpha() -> f64 {
    1.0
}

fn default_floor() -> f64 {
    1e-3
}

fn default_umbilic_tol() -> f64 {
    1e-2
}

impl SurfaceSection {
    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.dim) {
            return Err(Error::Validation(format!("surface.dim must be 2 or 3, got {}", self.dim)));
        }
        self.domain.validate(self.dim)?;
        self.surface.validate(self.dim).map_err(validation)?;
        if self.h_list.is_empty() || self.h_list.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err(Error::Validation("surface.h_list must hold positive spacings".into()));
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0 && self.eps_floor > 0.0 && self.umbilic_tol > 0.0) {
            return Err(Error::Validation("surface alpha, eps_floor and umbilic_tol out of range".into()));
        }
        Ok(())
    }
}

fn validation(e: Error) -> Error {
    match e {
        Error::Io { .. } | Error::Validation(_) => e,
        other => Error::Validation(other.to_string()),
    }
}

/// Loaded configuration with its canonical text and location.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: Config,
    /// Sorted-key TOML rendering of the parsed file.
    pub canonical: String,
    pub base_dir: PathBuf,
}

impl LoadedConfig {
    pub fn from_str(text: &str, base_dir: &Path) -> Result<Self> {
        let value: toml::Table = toml::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))?;
        let canonical = toml::to_string(&value).map_err(|e| Error::Validation(format!("config: {e}")))?;
        let config: Config = toml::from_str(text).map_err(|e| Error::Validation(format!("config: {e}")))?;
        Ok(Self {
            config,
            canonical,
            base_dir: base_dir.to_path_buf(),
        })
    }

    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Self::from_str("", Path::new(".")),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
                Self::from_str(&text, &dir)
            }
        }
    }

    /// Problem from `[domain]`, `[operator]` and `[boundary]`.
    pub fn problem(&self) -> Result<PlateauProblem> {
        let c = &self.config;
        let domain = c.domain.as_ref().ok_or_else(|| missing("domain"))?;
        let op = c.operator.as_ref().ok_or_else(|| missing("operator"))?;
        let boundary = c.boundary.as_ref().ok_or_else(|| missing("boundary"))?;
        let params = SumHessianParams::new(op.n, op.alpha, op.sigma).map_err(validation)?;
        PlateauProblem::new(domain.shape.clone(), domain.h, boundary.epsilon, params, op.lower_bound_a)
            .map_err(validation)
    }

    pub fn solver(&self) -> Result<&SolverConfig> {
        self.config.solver.validate().map_err(validation)?;
        for s in &self.config.solver.continuation {
            s.validate().map_err(validation)?;
        }
        Ok(&self.config.solver)
    }

    pub fn report(&self) -> Result<&ReportSection> {
        let r = &self.config.report;
        if r.n_list.iter().any(|n| !n.is_finite()) {
            return Err(Error::Validation("report.n_list values must be finite".into()));
        }
        Ok(r)
    }
}

fn missing(section: &str) -> Error {
    Error::Validation(format!("config section [{section}] is required for this command"))
}

/// 64-bit FNV-1a.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}
