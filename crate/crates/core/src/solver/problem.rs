use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypgeom::Domain;
use crate::symfun::{SumHessian, SumHessianParams};

/// Dirichlet problem `S_n(κ[u]) = σ` in `Ω`, `u = ε` on `∂Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlateauProblem {
    pub domain: Domain,
    pub h: f64,
    pub epsilon: f64,
    pub params: SumHessianParams,
    /// Threshold `A` of the monitor `σ_n(κ) > −A`.
    pub lower_bound_a: f64,
}

impl PlateauProblem {
    pub fn new(domain: Domain, h: f64, epsilon: f64, params: SumHessianParams, lower_bound_a: f64) -> Result<Self> {
        let dim = params.n;
        if !(2..=3).contains(&dim) {
            return Err(Error::Parameter(format!("solver supports n = 2 or 3, got {dim}")));
        }
        domain.validate(dim)?;
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Parameter(format!("grid spacing must be > 0, got {h}")));
        }
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(Error::Parameter(format!("epsilon must be > 0, got {epsilon}")));
        }
        if !(lower_bound_a.is_finite() && lower_bound_a >= 0.0) {
            return Err(Error::Parameter(format!("lower bound A must be >= 0, got {lower_bound_a}")));
        }
        Ok(Self {
            domain,
            h,
            epsilon,
            params,
            lower_bound_a,
        })
    }

    pub fn dim(&self) -> usize {
        self.params.n
    }

    pub fn operator(&self) -> SumHessian {
        self.params.operator()
    }

    pub fn with_epsilon(&self, epsilon: f64) -> Result<Self> {
        Self::new(self.domain.clone(), self.h, epsilon, self.params, self.lower_bound_a)
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        let params = SumHessianParams::new(self.params.n, self.params.alpha, sigma)?;
        Self::new(self.domain.clone(), self.h, self.epsilon, params, self.lower_bound_a)
    }

    /// Whether `∂Ω` meets the nonnegative mean curvature hypothesis.
    pub fn boundary_mean_convex(&self) -> bool {
        self.domain.has_nonnegative_mean_curvature()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JacobianMode {
    FiniteDifferenceStencil,
    #[default]
    ChainRule,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContinuationParameter {
    Epsilon,
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub parameter: ContinuationParameter,
    pub values: Vec<f64>,
}

impl Schedule {
    /// `ε` must strictly decrease; `σ` must be strictly monotone.
    pub fn validate(&self) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parameter("schedule values must be finite".into()));
        }
        let pairs = self.values.windows(2);
        let ok = match self.parameter {
            ContinuationParameter::Epsilon => pairs.clone().all(|w| w[1] < w[0]),
            ContinuationParameter::Sigma => {
                pairs.clone().all(|w| w[1] > w[0]) || pairs.clone().all(|w| w[1] < w[0])
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!(
                "{:?} schedule {:?} is not monotone",
                self.parameter, self.values
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub newton_tol: f64,
    pub max_iters: usize,
    pub backtrack: f64,
    pub armijo: f64,
    pub min_step: f64,
    pub cone_margin: f64,
    pub jacobian_mode: JacobianMode,
    pub linear_tol: f64,
    pub linear_max_iters: usize,
    pub continuation: Vec<Schedule>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            newton_tol: 1e-8,
            max_iters: 50,
            backtrack: 0.5,
            armijo: 1e-4,
            min_step: 1e-12,
            cone_margin: 1e-8,
            jacobian_mode: JacobianMode::ChainRule,
            linear_tol: 1e-10,
            linear_max_iters: 20_000,
            continuation: Vec::new(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("newton_tol", self.newton_tol),
            ("cone_margin", self.cone_margin),
            ("min_step", self.min_step),
            ("linear_tol", self.linear_tol),
            ("armijo", self.armijo),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.backtrack > 0.0 && self.backtrack < 1.0) {
            return Err(Error::Parameter(format!("backtrack factor must lie in (0, 1), got {}", self.backtrack)));
        }
        if self.armijo >= 1.0 {
            return Err(Error::Parameter(format!("armijo constant must be < 1, got {}", self.armijo)));
        }
        if self.max_iters == 0 || self.linear_max_iters == 0 {
            return Err(Error::Parameter("iteration limits must be positive".into()));
        }
        for s in &self.continuation {
            s.validate()?;
        }
        Ok(())
    }
}
