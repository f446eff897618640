use rayon::prelude::*;
use serde::Serialize;

use super::problem::PlateauProblem;
use crate::error::{Error, Result};
use crate::hypgeom::{CentralStencil, GraphGrid, NodeKind, PointGeometry};
use crate::symfun::sigma_k;

/// Curvature statistics over the interior nodes of a solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaStats {
    pub interior_max_abs: f64,
    /// Over interior nodes with a non-interior node in their `3^n` block.
    pub boundary_ring_max_abs: f64,
    /// `interior_max_abs / (1 + boundary_ring_max_abs)`.
    pub ratio_r: f64,
    pub min_sigma_n: f64,
    pub min_kappa: f64,
    pub max_kappa1: f64,
    pub interior_nodes: usize,
    pub ring_nodes: usize,
}

/// Interior maximum of `Q = ln κ₁ − N ln ν^{n+1}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QSummary {
    pub n: f64,
    pub max_value: Option<f64>,
    pub node: Option<usize>,
    pub coords: Option<Vec<f64>>,
    /// Interior nodes skipped because `κ₁ ≤ 0`.
    pub excluded_nodes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaNCheck {
    pub lower_bound_a: f64,
    pub min_sigma_n: f64,
    /// `min σ_n(κ) > −A`.
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateReport {
    pub kappa_stats: KappaStats,
    pub sigma_n_check: SigmaNCheck,
    pub q_field: Vec<QSummary>,
    /// Whether `∂Ω` has nonnegative mean curvature; recorded, not enforced.
    pub boundary_mean_convex: bool,
}

/// Geometry at every interior node, from central differences.
pub fn interior_geometry(grid: &GraphGrid) -> Result<Vec<Option<PointGeometry>>> {
    let stencil = CentralStencil::new(grid);
    let u = grid.heights();
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            if grid.kind(i) != NodeKind::Interior {
                return Ok(None);
            }
            if !grid.block_all(i, |j| grid.is_masked(j)) {
                return Err(Error::Domain(format!("interior node {i} has an unmasked neighbour")));
            }
            let jet = stencil.jet(u, i);
            PointGeometry::new(jet.u, &jet.grad, &jet.hess).map(Some)
        })
        .collect()
}

/// `κ₁` at interior nodes.
pub fn kappa1_field(geometry: &[Option<PointGeometry>]) -> Vec<Option<f64>> {
    geometry.iter().map(|g| g.as_ref().map(|g| g.kappa_max())).collect()
}

/// `Q = ln κ₁ − N ln ν^{n+1}` at interior nodes with `κ₁ > 0`.
pub fn q_field(geometry: &[Option<PointGeometry>], n: f64) -> Vec<Option<f64>> {
    geometry
        .iter()
        .map(|g| {
            g.as_ref()
                .filter(|g| g.kappa_max() > 0.0)
                .map(|g| g.kappa_max().ln() - n * g.nu.ln())
        })
        .collect()
}

/// Interior and boundary-ring curvature bounds, the `σ_n > −A` monitor and
/// the interior maxima of `Q` for each `N` in `n_list`.
pub fn estimate_report(solution: &GraphGrid, prob: &PlateauProblem, n_list: &[f64]) -> Result<EstimateReport> {
    let geometry = interior_geometry(solution)?;
    let dim = solution.dim();
    let mut stats = KappaStats {
        interior_max_abs: 0.0,
        boundary_ring_max_abs: 0.0,
        ratio_r: 0.0,
        min_sigma_n: f64::INFINITY,
        min_kappa: f64::INFINITY,
        max_kappa1: f64::NEG_INFINITY,
        interior_nodes: 0,
        ring_nodes: 0,
    };
    for (i, g) in geometry.iter().enumerate() {
        let Some(g) = g else { continue };
        let kappa: Vec<f64> = g.kappa.iter().copied().collect();
        let max_abs = kappa.iter().fold(0.0f64, |m, k| m.max(k.abs()));
        stats.interior_nodes += 1;
        stats.interior_max_abs = stats.interior_max_abs.max(max_abs);
        if !solution.block_all(i, |j| solution.kind(j) == NodeKind::Interior) {
            stats.ring_nodes += 1;
            stats.boundary_ring_max_abs = stats.boundary_ring_max_abs.max(max_abs);
        }
        stats.min_sigma_n = stats.min_sigma_n.min(sigma_k(&kappa, dim));
        stats.min_kappa = stats.min_kappa.min(g.kappa_min());
        stats.max_kappa1 = stats.max_kappa1.max(g.kappa_max());
    }
    if stats.interior_nodes == 0 {
        return Err(Error::Domain("solution has no interior nodes".into()));
    }
    stats.ratio_r = stats.interior_max_abs / (1.0 + stats.boundary_ring_max_abs);
    let q = n_list
        .iter()
        .map(|&n| {
            let field = q_field(&geometry, n);
            let mut best: Option<(usize, f64)> = None;
            for (i, v) in field.iter().enumerate() {
                if let Some(v) = *v {
                    if best.is_none_or(|(_, b)| v > b) {
                        best = Some((i, v));
                    }
                }
            }
            let excluded = geometry
                .iter()
                .filter(|g| g.as_ref().is_some_and(|g| g.kappa_max() <= 0.0))
                .count();
            QSummary {
                n,
                max_value: best.map(|b| b.1),
                node: best.map(|b| b.0),
                coords: best.map(|b| solution.coords(b.0)),
                excluded_nodes: excluded,
            }
        })
        .collect();
    Ok(EstimateReport {
        sigma_n_check: SigmaNCheck {
            lower_bound_a: prob.lower_bound_a,
            min_sigma_n: stats.min_sigma_n,
            holds: stats.min_sigma_n > -prob.lower_bound_a,
        },
        kappa_stats: stats,
        q_field: q,
        boundary_mean_convex: prob.boundary_mean_convex(),
    })
}
