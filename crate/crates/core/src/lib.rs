//! Numerics for hypersurfaces of constant sum Hessian curvature in the
//! upper half-space model of hyperbolic space.
//!
//! The operator is `S_n(κ) = σ_{n-1}(κ) + α σ_n(κ)` acting on the principal
//! curvatures of a vertical graph `x_{n+1} = u(x)`. The crate is organised as:
//!
//! - [`symfun`]: elementary symmetric polynomials, the sum Hessian operator,
//!   its derivatives and the Gårding / admissible cones.
//! - [`hypgeom`]: fundamental forms and principal curvatures of vertical
//!   graphs on uniform grids, analytic reference surfaces, grid I/O.
//! - [`inequality_lab`]: sampled and adversarial checks of the algebraic
//!   inequalities behind the interior curvature estimate.
//! - [`solver`]: damped Newton with continuation for the ε-regularized
//!   Dirichlet problem `S_n(κ[u]) = σ`, `u = ε` on `∂Ω`.
//! - [`harness`]: configuration, command dispatch and report emission for
//!   the `sumhess` binary.

pub mod error;
pub mod harness;
pub mod hypgeom;
pub mod inequality_lab;
pub mod solver;
pub mod symfun;

pub use error::{Error, Result};
