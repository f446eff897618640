//! Geometry of vertical graphs in the upper half-space model.
//!
//! A graph `x_{n+1} = u(x)` over a domain `Ω ⊂ ℝⁿ` is sampled on a uniform
//! grid. Principal curvatures are taken with respect to the upward unit
//! normal and the hyperbolic metric `ḡ = |dx|² / x_{n+1}²`.

mod analytic;
mod checks;
mod domain;
mod geometry;
mod grid;
pub mod io;

pub use analytic::{analytic_surface, AnalyticSurface, GridSpec, SurfaceKind};
pub use checks::{
    algebraic_residuals, angle_gradient_check, deep_interior, kappa_error, weighted_laplacian_check,
    AlgebraicResiduals, IdentityCheck,
};
pub use domain::Domain;
pub(crate) use geometry::sorted_eigen;
pub use geometry::{
    differentiate, euclidean_geometry, hyperbolic_shape, inverse_sqrt_metric, shape_matrix, CentralStencil,
    DerivativeField, EuclideanGeometry, GeometryField, HyperbolicShape, Jet, NodeDerivatives, PointGeometry,
};
pub(crate) use grid::neighbourhood;
pub use grid::{centred_layout, GraphGrid, NodeKind};
