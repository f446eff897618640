//! Damped Newton with continuation for `S_n(κ[u]) = σ` in `Ω`, `u = ε` on
//! `∂Ω`, and the curvature monitors evaluated on its solutions.

mod discretization;
mod jacobian;
mod linear;
mod newton;
mod problem;
mod report;
mod residual;

pub use discretization::{Discretization, Ghost};
pub use jacobian::{jacobian, Jacobian};
pub use linear::{bicgstab, Csr, LinearStats};
pub use newton::{
    continuation, initial_guess, newton_solve, umbilic_cap, umbilic_curvature, ConeEvent, ContinuationResult,
    NodeLocation, SolveReport, SolveStatus, Stage,
};
pub use problem::{ContinuationParameter, JacobianMode, PlateauProblem, Schedule, SolverConfig};
pub use report::{
    estimate_report, interior_geometry, kappa1_field, q_field, EstimateReport, KappaStats, QSummary, SigmaNCheck,
};
pub use residual::{residual, residual_with, ResidualField};
