//! Grid-level checks of the angle-function identities and curvature accuracy.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use super::analytic::AnalyticSurface;
use super::geometry::{CentralStencil, GeometryField};
use super::grid::{GraphGrid, NodeKind};
use crate::error::{Error, Result};
use crate::symfun::{sigma_k, SumHessian};

/// Interior nodes whose whole `3^n` block is interior with geometry, so
/// that fields derived from `Du` can be differenced there.
pub fn deep_interior(grid: &GraphGrid, field: &GeometryField) -> Vec<usize> {
    (0..grid.len())
        .filter(|&i| grid.kind(i) == NodeKind::Interior && field.get(i).is_some())
        .filter(|&i| {
            grid.block_all(i, |j| {
                grid.kind(j) == NodeKind::Interior && field.get(j).is_some()
            })
        })
        .collect()
}

/// Max over interior nodes of `max_i |κ_i − κ_exact|`.
pub fn kappa_error(surface: &AnalyticSurface, field: &GeometryField) -> f64 {
    field
        .interior(&surface.grid)
        .map(|(i, g)| {
            g.kappa
                .iter()
                .map(|k| (k - surface.exact_kappa[i]).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

/// Pointwise algebraic invariants of the computed geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlgebraicResiduals {
    /// `max |Σ_i (u_i/u)² + (ν^{n+1})² − 1|`.
    pub height_ratio_identity: f64,
    /// `max |κ_i − (u κ̃_i + ν^{n+1})|`.
    pub curvature_relation: f64,
    /// `max |Fᵀ F − I|` over principal frames.
    pub frame_orthonormality: f64,
    pub min_nu: f64,
    pub max_nu: f64,
    pub kappa_sorted: bool,
    pub nodes: usize,
}

pub fn algebraic_residuals(grid: &GraphGrid, field: &GeometryField) -> AlgebraicResiduals {
    let mut out = AlgebraicResiduals {
        height_ratio_identity: 0.0,
        curvature_relation: 0.0,
        frame_orthonormality: 0.0,
        min_nu: f64::INFINITY,
        max_nu: f64::NEG_INFINITY,
        kappa_sorted: true,
        nodes: 0,
    };
    for (_, g) in field.interior(grid) {
        let n = g.kappa.len();
        out.nodes += 1;
        let ratios = g.height_ratios();
        out.height_ratio_identity = out
            .height_ratio_identity
            .max((ratios.norm_squared() + g.nu * g.nu - 1.0).abs());
        for i in 0..n {
            let rel = (g.kappa[i] - (g.u * g.kappa_tilde[i] + g.nu)).abs();
            out.curvature_relation = out.curvature_relation.max(rel);
            if i + 1 < n && g.kappa[i] < g.kappa[i + 1] {
                out.kappa_sorted = false;
            }
        }
        let gram = g.frame.transpose() * &g.frame - DMatrix::identity(n, n);
        out.frame_orthonormality = out.frame_orthonormality.max(gram.amax());
        out.min_nu = out.min_nu.min(g.nu);
        out.max_nu = out.max_nu.max(g.nu);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub max_residual: f64,
    pub nodes: usize,
}

fn nu_values(grid: &GraphGrid, field: &GeometryField) -> Vec<f64> {
    (0..grid.len())
        .map(|i| field.get(i).map_or(f64::NAN, |g| g.nu))
        .collect()
}

fn central_gradient(stencil: &CentralStencil, values: &[f64], i: usize) -> DVector<f64> {
    DVector::from_iterator(
        stencil.dim,
        (0..stencil.dim).map(|k| stencil.first(i, k).iter().map(|&(j, w)| w * values[j]).sum()),
    )
}

/// Residual of `∇_i ν^{n+1} = (u_i/u)(ν^{n+1} − κ_i)` in the principal frame.
///
/// The hyperbolic-unit principal direction is `e_i = u w_i` in coordinates,
/// so `∇_i f = u w_i · Df` and `u_i/u = w_i · Du`; `Dν^{n+1}` is taken by
/// central differences of the computed `ν^{n+1}` field.
pub fn angle_gradient_check(grid: &GraphGrid, field: &GeometryField) -> IdentityCheck {
    let stencil = CentralStencil::new(grid);
    let nu = nu_values(grid, field);
    let nodes = deep_interior(grid, field);
    let mut max_residual: f64 = 0.0;
    for &i in &nodes {
        let g = field.get(i).expect("deep node has geometry");
        let dnu = central_gradient(&stencil, &nu, i);
        for k in 0..g.kappa.len() {
            let w = g.directions.column(k);
            let lhs = g.u * w.dot(&dnu);
            let rhs = w.dot(&g.grad_u) * (g.nu - g.kappa[k]);
            max_residual = max_residual.max((lhs - rhs).abs());
        }
    }
    IdentityCheck {
        max_residual,
        nodes: nodes.len(),
    }
}

/// Residual of
/// `Σ S^{ii} ∇_ii ν = 2 Σ S^{ii} (u_i/u) ∇_i ν + (n S_n(κ) − σ_{n-1}(κ))(1 + ν²)
///  − ν (Σ S^{ii} + Σ S^{ii} κ_i²)` on an umbilic surface.
///
/// Umbilicity makes all `S^{ii}` equal, so the left side is
/// `(Σ S^{ii} / n) Δ_g ν` with the Laplace–Beltrami operator of
/// `g = g̃ / u²`:
/// `Δ_g f = u² g̃^{ab} f_ab + (u^n / W) ∂_a(W u^{2-n} g̃^{ab}) f_b`.
pub fn weighted_laplacian_check(
    grid: &GraphGrid,
    field: &GeometryField,
    op: SumHessian,
    umbilic_tol: f64,
) -> Result<IdentityCheck> {
    for (i, g) in field.interior(grid) {
        let spread = g.kappa_max() - g.kappa_min();
        if spread > umbilic_tol {
            return Err(Error::Domain(format!(
                "surface is not umbilic: curvature spread {spread:.3e} at node {i} exceeds {umbilic_tol:.1e}"
            )));
        }
    }
    let n = grid.dim();
    let stencil = CentralStencil::new(grid);
    let nu = nu_values(grid, field);
    // flux coefficients W u^{2-n} g̃^{-1}, stored per (a, b)
    let mut flux = vec![vec![f64::NAN; grid.len()]; n * n];
    for (i, g) in field.nodes.iter().enumerate() {
        if let Some(g) = g {
            let w = 1.0 / g.nu;
            let ginv = DMatrix::identity(n, n) - &g.grad_u * g.grad_u.transpose() / (w * w);
            let scale = w * g.u.powi(2 - n as i32);
            for a in 0..n {
                for b in 0..n {
                    flux[a * n + b][i] = scale * ginv[(a, b)];
                }
            }
        }
    }
    let nodes = deep_interior(grid, field);
    let mut max_residual: f64 = 0.0;
    for &i in &nodes {
        let g = field.get(i).expect("deep node has geometry");
        let w = 1.0 / g.nu;
        let jet = stencil.jet(&nu, i);
        let ginv = DMatrix::identity(n, n) - &g.grad_u * g.grad_u.transpose() / (w * w);
        let mut lap = 0.0;
        for a in 0..n {
            for b in 0..n {
                lap += g.u * g.u * ginv[(a, b)] * jet.hess[(a, b)];
            }
        }
        for b in 0..n {
            let div: f64 = (0..n)
                .map(|a| {
                    stencil
                        .first(i, a)
                        .iter()
                        .map(|&(j, wt)| wt * flux[a * n + b][j])
                        .sum::<f64>()
                })
                .sum();
            lap += g.u.powi(n as i32) / w * div * jet.grad[b];
        }
        let kappa: Vec<f64> = g.kappa.iter().copied().collect();
        let bundle = op.eval_bundle(&kappa);
        let trace: f64 = bundle.gradient.iter().sum();
        let lhs = trace / n as f64 * lap;
        let mut cross = 0.0;
        let mut weighted_sq = 0.0;
        for k in 0..n {
            let dir = g.directions.column(k);
            let ratio = dir.dot(&g.grad_u);
            let dnu = g.u * dir.dot(&jet.grad);
            cross += bundle.gradient[k] * ratio * dnu;
            weighted_sq += bundle.gradient[k] * kappa[k] * kappa[k];
        }
        let euler = n as f64 * bundle.value - sigma_k(&kappa, n - 1);
        let rhs = 2.0 * cross + euler * (1.0 + g.nu * g.nu) - g.nu * (trace + weighted_sq);
        max_residual = max_residual.max((lhs - rhs).abs());
    }
    Ok(IdentityCheck {
        max_residual,
        nodes: nodes.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypgeom::{analytic_surface, Domain, GridSpec, SurfaceKind};

    fn field_for(kind: SurfaceKind, radius: f64, h: f64) -> (AnalyticSurface, GeometryField) {
        let spec = GridSpec {
            domain: Domain::Ball { radius },
            dim: 2,
            h,
        };
        let s = analytic_surface(&kind, &spec, 1e-3).unwrap();
        let f = GeometryField::from_grid(&s.grid).unwrap();
        (s, f)
    }

    #[test]
    fn horosphere_identities_are_exact() {
        let (s, f) = field_for(SurfaceKind::Horosphere { height: 1.0 }, 0.5, 0.05);
        assert_eq!(angle_gradient_check(&s.grid, &f).max_residual, 0.0);
        let lap = weighted_laplacian_check(&s.grid, &f, SumHessian::new(1.0), 1e-8).unwrap();
        assert!(lap.max_residual < 1e-10 && lap.nodes > 0);
        assert!(kappa_error(&s, &f) < 1e-14);
    }

    #[test]
    fn non_umbilic_surface_rejected() {
        let spec = GridSpec {
            domain: Domain::Ball { radius: 0.5 },
            dim: 2,
            h: 0.05,
        };
        let tilted = analytic_surface(
            &SurfaceKind::TiltedPlane {
                offset: 2.0,
                slope: vec![0.0, 0.0],
            },
            &spec,
            1e-3,
        )
        .unwrap();
        let u: Vec<f64> = (0..tilted.grid.len())
            .map(|i| {
                let x = tilted.grid.coords(i);
                2.0 + 0.8 * x[0] * x[0]
            })
            .collect();
        let grid = tilted.grid.with_heights(u).unwrap();
        let f = GeometryField::from_grid(&grid).unwrap();
        assert!(weighted_laplacian_check(&grid, &f, SumHessian::new(1.0), 1e-3).is_err());
    }

    #[test]
    fn hemisphere_angle_check_small() {
        let (s, f) = field_for(SurfaceKind::Hemisphere { radius: 1.0 }, 0.8, 1.0 / 32.0);
        let a = angle_gradient_check(&s.grid, &f);
        assert!(a.max_residual < 5e-3, "{}", a.max_residual);
        let alg = algebraic_residuals(&s.grid, &f);
        assert!(alg.curvature_relation < 1e-12);
        assert!(alg.height_ratio_identity < 1e-12);
        assert!(alg.frame_orthonormality < 1e-10);
        assert!(alg.kappa_sorted);
        assert!(alg.min_nu > 0.0 && alg.max_nu <= 1.0);
    }
}
