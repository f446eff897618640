//! Sampled and adversarial checks of the algebraic inequalities satisfied
//! by the sum Hessian operator on its admissible cone.

mod concavity;
mod lemmas;
mod liren;
mod sampling;

pub use concavity::{
    concavity_lhs, concavity_search_k, AdversarialRecord, ConcavityInstance, ConcavityOptions, ConcavitySearch,
    Instance, SearchStatus, VIOLATION_TOL,
};
pub use lemmas::{
    identity_scan, kappa_floor_check, kappa_floor_scan, lemma21_residuals, lemma22_ratio, theta_scan, FloorScan,
    IdentityScan, Lemma21Residuals, ThetaScan, ThetaWitness,
};
pub use liren::{liren_decomposition_check, liren_scan, LiRenCheck, LiRenScan, FD_STEP, MIN_EIGEN_GAP};
pub use sampling::{
    cone_samples, default_interval, draw_point, draw_unit, parallel_map, sample_rng, sort_desc, SampleConfig,
};
