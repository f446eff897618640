use serde::{Deserialize, Serialize};

use super::domain::Domain;
use super::grid::{centred_layout, GraphGrid, NodeKind};
use crate::error::{Error, Result};

/// Umbilic reference graphs with closed-form curvature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceKind {
    /// `u ≡ height`; `κ = 1`.
    Horosphere { height: f64 },
    /// Euclidean hemisphere centred on the ideal boundary; totally geodesic.
    Hemisphere { radius: f64 },
    /// Sphere of radius `r` whose centre lies at depth `a` below the ideal
    /// boundary, `u = √(r² − |x|²) − a`; `κ = a / r`.
    Cap { depth: f64, radius: f64 },
    /// `u = offset + slope · x`; `κ = ν^{n+1} = 1 / √(1 + |slope|²)`.
    TiltedPlane { offset: f64, slope: Vec<f64> },
}

impl SurfaceKind {
    pub fn validate(&self, dim: usize) -> Result<()> {
        match self {
            SurfaceKind::Horosphere { height } if *height > 0.0 => Ok(()),
            SurfaceKind::Hemisphere { radius } if *radius > 0.0 => Ok(()),
            SurfaceKind::Cap { depth, radius } if *radius > 0.0 && depth.abs() < *radius => Ok(()),
            SurfaceKind::TiltedPlane { slope, offset } if slope.len() == dim && offset.is_finite() => {
                Ok(())
            }
            other => Err(Error::Domain(format!("invalid surface parameters {other:?}"))),
        }
    }

    pub fn height(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        match self {
            SurfaceKind::Horosphere { height } => *height,
            SurfaceKind::Hemisphere { radius } => (radius * radius - r2).sqrt(),
            SurfaceKind::Cap { depth, radius } => (radius * radius - r2).sqrt() - depth,
            SurfaceKind::TiltedPlane { offset, slope } => {
                offset + slope.iter().zip(x).map(|(s, v)| s * v).sum::<f64>()
            }
        }
    }

    /// Vertical component of the upward unit normal.
    pub fn nu(&self, x: &[f64]) -> f64 {
        match self {
            SurfaceKind::Horosphere { .. } => 1.0,
            SurfaceKind::Hemisphere { radius } => self.height(x) / radius,
            SurfaceKind::Cap { depth, radius } => (self.height(x) + depth) / radius,
            SurfaceKind::TiltedPlane { slope, .. } => {
                1.0 / (1.0 + slope.iter().map(|s| s * s).sum::<f64>()).sqrt()
            }
        }
    }

    /// The common principal curvature.
    pub fn kappa(&self) -> f64 {
        match self {
            SurfaceKind::Horosphere { .. } => 1.0,
            SurfaceKind::Hemisphere { .. } => 0.0,
            SurfaceKind::Cap { depth, radius } => depth / radius,
            SurfaceKind::TiltedPlane { slope, .. } => {
                1.0 / (1.0 + slope.iter().map(|s| s * s).sum::<f64>()).sqrt()
            }
        }
    }
}

/// Domain, dimension and spacing of a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub domain: Domain,
    pub dim: usize,
    pub h: f64,
}

/// Grid filled with exact heights plus the exact curvature at every node.
#[derive(Debug, Clone)]
pub struct AnalyticSurface {
    pub kind: SurfaceKind,
    pub spec: GridSpec,
    pub grid: GraphGrid,
    pub exact_kappa: Vec<f64>,
}

/// Samples `kind` on the nodes of `spec.domain` (closed). Nodes whose full
/// `3^n` block is in the domain are interior; the rest of the domain nodes
/// are boundary nodes carrying exact data.
pub fn analytic_surface(kind: &SurfaceKind, spec: &GridSpec, eps_floor: f64) -> Result<AnalyticSurface> {
    spec.domain.validate(spec.dim)?;
    kind.validate(spec.dim)?;
    if !(eps_floor > 0.0) {
        return Err(Error::Domain(format!("height floor must be > 0, got {eps_floor}")));
    }
    let (shape, origin) = centred_layout(&spec.domain, spec.dim, spec.h, 1);
    let len: usize = shape.iter().product();
    let probe = GraphGrid::new(
        spec.dim,
        shape.clone(),
        origin.clone(),
        spec.h,
        vec![NodeKind::Interior; len],
        vec![1.0; len],
    )?;
    let tol = 1e-12 * spec.h;
    let inside: Vec<bool> = (0..len)
        .map(|i| spec.domain.sdf(&probe.coords(i)) <= tol)
        .collect();
    let mut kinds = vec![NodeKind::Outside; len];
    let mut u = vec![0.0; len];
    for i in 0..len {
        if !inside[i] {
            continue;
        }
        let x = probe.coords(i);
        let v = kind.height(&x);
        if !(v.is_finite() && v >= eps_floor) {
            return Err(Error::Domain(format!(
                "surface height {v} at {x:?} is below the floor {eps_floor}; domain exceeds the footprint"
            )));
        }
        u[i] = v;
        kinds[i] = if probe.block_all(i, |j| inside[j]) {
            NodeKind::Interior
        } else {
            NodeKind::Boundary
        };
    }
    let grid = GraphGrid::new(spec.dim, shape, origin, spec.h, kinds, u)?;
    let exact_kappa = vec![kind.kappa(); len];
    Ok(AnalyticSurface {
        kind: kind.clone(),
        spec: spec.clone(),
        grid,
        exact_kappa,
    })
}
