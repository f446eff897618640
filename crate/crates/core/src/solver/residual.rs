use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;

use super::problem::PlateauProblem;
use crate::error::{Error, Result};
use crate::hypgeom::{inverse_sqrt_metric, shape_matrix, CentralStencil, GraphGrid, Jet};
use crate::symfun::{MatrixEval, SumHessian};

/// Operator value at one node together with the cone data needed by the
/// line search.
#[derive(Debug, Clone)]
pub(crate) struct NodeEval {
    pub jet: Jet,
    pub eval: MatrixEval,
}

impl NodeEval {
    /// Smallest of `σ_1, …, σ_{n-1}` and `S_n`; the node is admissible with
    /// margin `m` iff this exceeds `m`.
    pub fn cone_slack(&self) -> f64 {
        let n = self.jet.grad.len();
        self.eval.sigmas[1..n]
            .iter()
            .copied()
            .fold(self.eval.value, f64::min)
    }
}

pub(crate) fn node_eval(stencil: &CentralStencil, op: SumHessian, i: usize, get: impl Fn(usize) -> f64) -> NodeEval {
    let jet = stencil.jet_with(i, get);
    let a = shape_matrix(jet.u, &jet.grad, &jet.hess);
    let a = (&a + a.transpose()) * 0.5;
    let eval = op.matrix_eval(&a).expect("shape matrix is square and symmetric");
    NodeEval { jet, eval }
}

/// Per-node residual `S_n(κ[u]) − σ` on the interior nodes of a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualField {
    /// `None` off the interior.
    pub values: Vec<Option<f64>>,
    pub max_norm: f64,
    /// Node with the largest `|residual|`.
    pub worst_node: Option<usize>,
    /// Interior nodes outside `Γ̃_n`.
    pub inadmissible: Vec<usize>,
}

/// Residual of `S_n(κ) = σ` for an explicit operator and right-hand side,
/// evaluated with central differences at every interior node.
pub fn residual_with(grid: &GraphGrid, op: SumHessian, sigma: f64) -> Result<ResidualField> {
    for i in 0..grid.len() {
        if grid.is_masked(i) && grid.height(i) <= 0.0 {
            return Err(Error::Domain(format!("height {} at node {i} is not positive", grid.height(i))));
        }
    }
    let stencil = CentralStencil::new(grid);
    let interior = grid.interior_nodes();
    for &i in &interior {
        if !grid.block_all(i, |j| grid.is_masked(j)) {
            return Err(Error::Domain(format!("interior node {i} has an unmasked neighbour")));
        }
    }
    let u = grid.heights();
    let evals: Vec<(usize, f64, bool)> = interior
        .par_iter()
        .map(|&i| {
            let e = node_eval(&stencil, op, i, |j| u[j]);
            (i, e.eval.value - sigma, e.cone_slack() > 0.0)
        })
        .collect();
    let mut values = vec![None; grid.len()];
    let mut max_norm: f64 = 0.0;
    let mut worst_node = None;
    let mut inadmissible = Vec::new();
    for (i, r, ok) in evals {
        values[i] = Some(r);
        if r.abs() > max_norm || worst_node.is_none() {
            max_norm = max_norm.max(r.abs());
            worst_node = Some(i);
        }
        if !ok {
            inadmissible.push(i);
        }
    }
    Ok(ResidualField {
        values,
        max_norm,
        worst_node,
        inadmissible,
    })
}

pub fn residual(grid: &GraphGrid, prob: &PlateauProblem) -> Result<ResidualField> {
    residual_with(grid, prob.operator(), prob.params.sigma)
}

/// Derivatives of `S_n(a(u, p, r))` with respect to the jet entries, where
/// `a = (u/W) γ r γ + I/W` and `G = ∂S_n/∂a`. The mixed entry `r_kl`,
/// `k ≠ l`, is one variable feeding both `(k, l)` and `(l, k)`.
pub(crate) struct JetSensitivity {
    pub du: f64,
    pub dp: DVector<f64>,
    pub dr: DMatrix<f64>,
}

pub(crate) fn jet_sensitivity(jet: &Jet, g: &DMatrix<f64>) -> JetSensitivity {
    let n = jet.grad.len();
    let p = &jet.grad;
    let r = &jet.hess;
    let u = jet.u;
    let w = (1.0 + p.norm_squared()).sqrt();
    let gamma = inverse_sqrt_metric(p);
    let m = &gamma * r * &gamma;
    let tr_gm = (g * &m).trace();
    let du = tr_gm / w;
    let b = &gamma * g * &gamma;
    let mut dr = b * (u / w);
    for k in 0..n {
        for l in 0..n {
            if k != l {
                dr[(k, l)] *= 2.0;
            }
        }
    }
    let phi = 1.0 / (w * (1.0 + w));
    let dphi = -(1.0 + 2.0 * w) / (w * (1.0 + w)).powi(2);
    let ppt = p * p.transpose();
    let rgg = r * &gamma * g;
    let tr_g = g.trace();
    let mut dp = DVector::zeros(n);
    for k in 0..n {
        let dw = p[k] / w;
        let d_inv_w = -p[k] / (w * w * w);
        let mut e_pt = DMatrix::zeros(n, n);
        for j in 0..n {
            e_pt[(k, j)] += p[j];
            e_pt[(j, k)] += p[j];
        }
        let dgamma = &ppt * (-dphi * dw) - e_pt * phi;
        dp[k] = d_inv_w * (u * tr_gm + tr_g) + 2.0 * (u / w) * (&dgamma * &rgg).trace();
    }
    JetSensitivity { du, dp, dr }
}

/// Stencil weights of the linearization at node `i`, as `(node, weight)`.
pub(crate) fn linearized_stencil(stencil: &CentralStencil, i: usize, s: &JetSensitivity) -> Vec<(usize, f64)> {
    let n = stencil.dim;
    let mut out = vec![(i, s.du)];
    for k in 0..n {
        out.extend(stencil.first(i, k).iter().map(|&(j, w)| (j, w * s.dp[k])));
        out.extend(stencil.second(i, k).iter().map(|&(j, w)| (j, w * s.dr[(k, k)])));
        for l in (k + 1)..n {
            out.extend(stencil.mixed(i, k, l).iter().map(|&(j, w)| (j, w * s.dr[(k, l)])));
        }
    }
    out
}
