use rayon::prelude::*;

use super::discretization::Discretization;
use super::linear::Csr;
use super::problem::{JacobianMode, PlateauProblem};
use super::residual::{jet_sensitivity, linearized_stencil, node_eval};
use crate::error::Result;
use crate::hypgeom::{CentralStencil, GraphGrid};
use crate::symfun::SumHessian;

/// Linearization of the discrete residual with respect to the unknowns.
#[derive(Debug, Clone)]
pub struct Jacobian {
    /// Row and column `k` refer to `unknown_nodes[k]`.
    pub matrix: Csr,
    pub unknown_nodes: Vec<usize>,
    /// Nodes outside `Γ̃_n`, where the operator is not elliptic.
    pub ellipticity_warnings: Vec<usize>,
}

fn merge_terms(disc: &Discretization, node_weights: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let mut out = Vec::with_capacity(node_weights.len() * 2);
    for (node, w) in node_weights {
        for (k, t) in disc.node_terms(node) {
            out.push((k, w * t));
        }
    }
    out.sort_by_key(|&(k, _)| k);
    let mut merged: Vec<(usize, f64)> = Vec::with_capacity(out.len());
    for (k, v) in out {
        match merged.last_mut() {
            Some((last, acc)) if *last == k => *acc += v,
            _ => merged.push((k, v)),
        }
    }
    merged
}

pub(crate) fn assemble(disc: &Discretization, u: &[f64], op: SumHessian, mode: JacobianMode) -> Jacobian {
    let stencil = CentralStencil::new(disc.template());
    let unknowns = disc.unknowns();
    let rows: Vec<(Vec<(usize, f64)>, bool)> = unknowns
        .par_iter()
        .map(|&i| {
            let base = node_eval(&stencil, op, i, |j| u[j]);
            let elliptic = base.cone_slack() > 0.0;
            let sens = jet_sensitivity(&base.jet, &base.eval.gradient);
            let pattern = merge_terms(disc, linearized_stencil(&stencil, i, &sens));
            let row = match mode {
                JacobianMode::ChainRule => pattern,
                JacobianMode::FiniteDifferenceStencil => pattern
                    .iter()
                    .map(|&(k, _)| {
                        let node_k = unknowns[k];
                        let xk = u[node_k];
                        let step = (1e-6 * xk.abs()).max(1e-6);
                        let shifted = |t: f64| {
                            node_eval(&stencil, op, i, |j| {
                                let dj: f64 = disc
                                    .node_terms(j)
                                    .iter()
                                    .filter(|&&(m, _)| m == k)
                                    .map(|&(_, w)| w)
                                    .sum();
                                u[j] + t * dj
                            })
                            .eval
                            .value
                        };
                        (k, (shifted(step) - shifted(-step)) / (2.0 * step))
                    })
                    .collect(),
            };
            (row, elliptic)
        })
        .collect();
    let mut ellipticity_warnings = Vec::new();
    let mut matrix_rows = Vec::with_capacity(rows.len());
    for (k, (row, elliptic)) in rows.into_iter().enumerate() {
        if !elliptic {
            ellipticity_warnings.push(unknowns[k]);
        }
        matrix_rows.push(row);
    }
    Jacobian {
        matrix: Csr::from_rows(unknowns.len(), matrix_rows),
        unknown_nodes: unknowns.to_vec(),
        ellipticity_warnings,
    }
}

/// Jacobian of the residual at the state `u`. Ghost heights are recomputed
/// from the interior values of `u`, so only those enter the linearization.
pub fn jacobian(u: &GraphGrid, prob: &PlateauProblem, mode: JacobianMode) -> Result<Jacobian> {
    let disc = Discretization::new(prob)?;
    let x = disc.unknowns_from(u)?;
    Ok(assemble(&disc, &disc.fill(&x), prob.operator(), mode))
}
