use rayon::prelude::*;
use serde::Serialize;

use super::discretization::Discretization;
use super::jacobian::assemble;
use super::linear::bicgstab;
use super::problem::{ContinuationParameter, PlateauProblem, SolverConfig};
use super::report::{estimate_report, EstimateReport};
use super::residual::node_eval;
use crate::error::{Error, Result};
use crate::hypgeom::{shape_matrix, sorted_eigen, CentralStencil, GraphGrid};
use crate::symfun::{SumHessian, SumHessianParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    /// Line search step fell below the minimum.
    Stalled,
    MaxIters,
    /// Every trial step in the final line search left the admissible cone.
    ConeFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NodeLocation {
    pub node: usize,
    pub coords: Vec<f64>,
}

/// Trial step rejected because it left the admissible set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeEvent {
    pub iteration: usize,
    pub step: f64,
    pub worst: NodeLocation,
    /// `min(σ_1, …, σ_{n-1}, S_n)` at the worst node.
    pub cone_slack: f64,
    pub heights_positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub converged: bool,
    pub iterations: usize,
    pub unknowns: usize,
    /// Max-norm residual of every accepted iterate, starting with `u0`.
    pub residual_history: Vec<f64>,
    pub step_history: Vec<f64>,
    pub backtracks: usize,
    pub linear_iterations: Vec<usize>,
    pub cone_events: Vec<ConeEvent>,
    /// Smallest cone slack over nodes for every accepted iterate.
    pub min_cone_slack_history: Vec<f64>,
    /// Smallest principal curvature over nodes for every accepted iterate.
    pub min_kappa_history: Vec<f64>,
    /// `min κ > −1/α` on every accepted iterate; `None` when `α = 0`.
    pub kappa_floor_held: Option<bool>,
    pub ellipticity_warnings: usize,
    /// Node of largest residual in the final iterate.
    pub worst_node: Option<NodeLocation>,
    pub final_residual: f64,
    pub estimate: Option<EstimateReport>,
}

struct State {
    u: Vec<f64>,
    residual: Vec<f64>,
    slack: Vec<f64>,
    positive: bool,
}

impl State {
    fn norm(&self) -> f64 {
        self.residual.iter().fold(0.0, |m, r| m.max(r.abs()))
    }

    fn worst_residual(&self) -> usize {
        argmax(self.residual.iter().map(|r| r.abs()))
    }

    fn min_slack(&self) -> (usize, f64) {
        let k = argmax(self.slack.iter().map(|s| -s));
        (k, self.slack.get(k).copied().unwrap_or(f64::INFINITY))
    }

    fn admissible(&self, margin: f64) -> bool {
        self.positive && self.min_slack().1 > margin
    }
}

fn argmax(values: impl Iterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (k, v) in values.enumerate() {
        if v > best.1 || v.is_nan() {
            best = (k, v);
            if v.is_nan() {
                break;
            }
        }
    }
    best.0
}

fn evaluate(disc: &Discretization, x: &[f64], op: SumHessian, sigma: f64) -> State {
    let u = disc.fill(x);
    let stencil = CentralStencil::new(disc.template());
    let tpl = disc.template();
    let positive = (0..u.len()).all(|i| !tpl.is_masked(i) || u[i] > 0.0);
    let (residual, slack): (Vec<f64>, Vec<f64>) = disc
        .unknowns()
        .par_iter()
        .map(|&i| {
            let e = node_eval(&stencil, op, i, |j| u[j]);
            let r = e.eval.value - sigma;
            let s = e.cone_slack();
            (if r.is_finite() { r } else { f64::INFINITY }, if s.is_finite() { s } else { f64::NEG_INFINITY })
        })
        .unzip();
    State {
        u,
        residual,
        slack,
        positive,
    }
}

fn min_kappa(disc: &Discretization, u: &[f64]) -> f64 {
    let stencil = CentralStencil::new(disc.template());
    disc.unknowns()
        .par_iter()
        .map(|&i| {
            let jet = stencil.jet(u, i);
            let a = shape_matrix(jet.u, &jet.grad, &jet.hess);
            let (vals, _) = sorted_eigen((&a + a.transpose()) * 0.5);
            vals[vals.len() - 1]
        })
        .reduce(|| f64::INFINITY, f64::min)
}

fn location(disc: &Discretization, node: usize) -> NodeLocation {
    NodeLocation {
        node,
        coords: disc.template().coords(node),
    }
}

/// Damped Newton for the discrete problem starting from `u0`, whose
/// layout must match the problem's discretization (as produced by
/// [`initial_guess`]). Ghost heights in `u0` are ignored.
pub fn newton_solve(u0: &GraphGrid, prob: &PlateauProblem, cfg: &SolverConfig) -> Result<(GraphGrid, SolveReport)> {
    cfg.validate()?;
    let disc = Discretization::new(prob)?;
    let x0 = disc.unknowns_from(u0)?;
    newton_from(&disc, x0, prob, cfg)
}

fn newton_from(
    disc: &Discretization,
    mut x: Vec<f64>,
    prob: &PlateauProblem,
    cfg: &SolverConfig,
) -> Result<(GraphGrid, SolveReport)> {
    let op = prob.operator();
    let sigma = prob.params.sigma;
    let alpha = prob.params.alpha;
    let mut state = evaluate(disc, &x, op, sigma);
    if !state.admissible(cfg.cone_margin) {
        let (k, slack) = state.min_slack();
        return Err(Error::Precondition(format!(
            "initial state is not admissible with margin {:.1e}: slack {slack:.3e} at {:?}, heights positive: {}",
            cfg.cone_margin,
            disc.template().coords(disc.unknowns()[k]),
            state.positive
        )));
    }
    let mut report = SolveReport {
        status: SolveStatus::MaxIters,
        converged: false,
        iterations: 0,
        unknowns: disc.n_unknowns(),
        residual_history: vec![state.norm()],
        step_history: Vec::new(),
        backtracks: 0,
        linear_iterations: Vec::new(),
        cone_events: Vec::new(),
        min_cone_slack_history: vec![state.min_slack().1],
        min_kappa_history: vec![min_kappa(disc, &state.u)],
        kappa_floor_held: None,
        ellipticity_warnings: 0,
        worst_node: None,
        final_residual: state.norm(),
        estimate: None,
    };
    loop {
        let norm = state.norm();
        if norm <= cfg.newton_tol {
            report.status = SolveStatus::Converged;
            break;
        }
        if report.iterations >= cfg.max_iters {
            report.status = SolveStatus::MaxIters;
            break;
        }
        let jac = assemble(disc, &state.u, op, cfg.jacobian_mode);
        report.ellipticity_warnings += jac.ellipticity_warnings.len();
        let rhs: Vec<f64> = state.residual.iter().map(|r| -r).collect();
        let (delta, stats) = bicgstab(&jac.matrix, &rhs, cfg.linear_tol, cfg.linear_max_iters);
        report.linear_iterations.push(stats.iterations);
        let mut t = 1.0;
        let mut accepted = None;
        let mut last_cone_reject = false;
        while t >= cfg.min_step {
            let trial: Vec<f64> = x.iter().zip(&delta).map(|(a, d)| a + t * d).collect();
            let s = evaluate(disc, &trial, op, sigma);
            if !s.admissible(cfg.cone_margin) {
                let (k, slack) = s.min_slack();
                report.cone_events.push(ConeEvent {
                    iteration: report.iterations + 1,
                    step: t,
                    worst: location(disc, disc.unknowns()[k]),
                    cone_slack: slack,
                    heights_positive: s.positive,
                });
                last_cone_reject = true;
            } else if s.norm() <= (1.0 - cfg.armijo * t) * norm {
                accepted = Some((trial, s));
                break;
            } else {
                last_cone_reject = false;
            }
            report.backtracks += 1;
            t *= cfg.backtrack;
        }
        let Some((trial, s)) = accepted else {
            report.status = if last_cone_reject {
                SolveStatus::ConeFailure
            } else {
                SolveStatus::Stalled
            };
            break;
        };
        x = trial;
        state = s;
        report.iterations += 1;
        report.step_history.push(t);
        report.residual_history.push(state.norm());
        report.min_cone_slack_history.push(state.min_slack().1);
        report.min_kappa_history.push(min_kappa(disc, &state.u));
    }
    report.converged = report.status == SolveStatus::Converged;
    report.final_residual = state.norm();
    report.worst_node = Some(location(disc, disc.unknowns()[state.worst_residual()]));
    if alpha > 0.0 {
        report.kappa_floor_held = Some(report.min_kappa_history.iter().all(|&k| k > -1.0 / alpha));
    }
    let grid = disc.template().with_heights(state.u)?;
    Ok((grid, report))
}

/// Root `c ∈ (0, 1)` of `n c^{n-1} + α c^n = σ`, the curvature of the
/// umbilic solutions.
pub fn umbilic_curvature(params: &SumHessianParams) -> Result<f64> {
    let n = params.n as i32;
    let f = |c: f64| n as f64 * c.powi(n - 1) + params.alpha * c.powi(n) - params.sigma;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if !(f(lo) < 0.0 && f(hi) > 0.0) {
        return Err(Error::Parameter(format!(
            "no umbilic root in (0, 1) for n = {n}, alpha = {}, sigma = {}",
            params.alpha, params.sigma
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sphere `(centre depth a, radius r)` with `a / r = c` through the sphere
/// `|x| = R` at height `ε`.
pub fn umbilic_cap(c: f64, circumradius: f64, epsilon: f64) -> (f64, f64) {
    let (e, big_r) = (epsilon, circumradius);
    let r = (e * c + (e * e * c * c + (1.0 - c * c) * (big_r * big_r + e * e)).sqrt()) / (1.0 - c * c);
    (c * r, r)
}

/// Umbilic cap with the constant curvature solving the scalar equation,
/// through `∂Ω` at height `ε` (through the circumscribed sphere for a box),
/// clamped to `u ≥ ε`.
pub fn initial_guess(prob: &PlateauProblem) -> Result<GraphGrid> {
    let disc = Discretization::new(prob)?;
    disc.grid(&cap_unknowns(&disc, prob)?)
}

fn cap_unknowns(disc: &Discretization, prob: &PlateauProblem) -> Result<Vec<f64>> {
    let c = umbilic_curvature(&prob.params)?;
    let (a, r) = umbilic_cap(c, prob.domain.circumradius(), prob.epsilon);
    let eps = prob.epsilon;
    Ok(disc.sample(|x| {
        let rho2: f64 = x.iter().map(|v| v * v).sum();
        ((r * r - rho2).max(0.0).sqrt() - a).max(eps)
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage {
    pub parameter: Option<ContinuationParameter>,
    pub epsilon: f64,
    pub sigma: f64,
    /// Whether the stage started from the previous stage's solution.
    pub warm_start: bool,
    pub report: SolveReport,
}

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub stages: Vec<Stage>,
    /// A stage failed and later stages were skipped.
    pub truncated: bool,
    /// Solution of the last converged stage.
    pub solution: Option<GraphGrid>,
}

/// Runs the schedules in order, warm-starting each stage. An `ε` stage
/// shifts the previous solution down by the change in `ε`; a `σ` stage
/// reuses it unchanged. A warm start outside the cone falls back to the
/// umbilic cap. An empty schedule list gives a single solve.
pub fn continuation(prob: &PlateauProblem, cfg: &SolverConfig, n_list: &[f64]) -> Result<ContinuationResult> {
    cfg.validate()?;
    let mut plan: Vec<(Option<ContinuationParameter>, PlateauProblem)> = Vec::new();
    let mut current = prob.clone();
    for s in &cfg.continuation {
        for &v in &s.values {
            current = match s.parameter {
                ContinuationParameter::Epsilon => current.with_epsilon(v)?,
                ContinuationParameter::Sigma => current.with_sigma(v)?,
            };
            plan.push((Some(s.parameter), current.clone()));
        }
    }
    if plan.is_empty() {
        plan.push((None, prob.clone()));
    }
    let mut stages = Vec::new();
    let mut previous: Option<(PlateauProblem, GraphGrid)> = None;
    let mut truncated = false;
    let mut solution = None;
    for (parameter, stage_prob) in plan {
        let disc = Discretization::new(&stage_prob)?;
        let warm = previous.as_ref().map(|(p, g)| -> Result<Vec<f64>> {
            let shift = p.epsilon - stage_prob.epsilon;
            Ok(disc.unknowns_from(g)?.iter().map(|v| v - shift).collect())
        });
        let (grid, mut report, warm_start) = match warm {
            Some(Ok(x)) => match newton_from(&disc, x, &stage_prob, cfg) {
                Ok((g, r)) => (g, r, true),
                Err(Error::Precondition(_)) => {
                    let (g, r) = newton_from(&disc, cap_unknowns(&disc, &stage_prob)?, &stage_prob, cfg)?;
                    (g, r, false)
                }
                Err(e) => return Err(e),
            },
            Some(Err(e)) => return Err(e),
            None => {
                let (g, r) = newton_from(&disc, cap_unknowns(&disc, &stage_prob)?, &stage_prob, cfg)?;
                (g, r, false)
            }
        };
        report.estimate = Some(estimate_report(&grid, &stage_prob, n_list)?);
        let converged = report.converged;
        stages.push(Stage {
            parameter,
            epsilon: stage_prob.epsilon,
            sigma: stage_prob.params.sigma,
            warm_start,
            report,
        });
        if !converged {
            truncated = true;
            break;
        }
        solution = Some(grid.clone());
        previous = Some((stage_prob, grid));
    }
    Ok(ContinuationResult {
        stages,
        truncated,
        solution,
    })
}
