use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use super::sampling::{cone_samples, parallel_map, sample_rng, SampleConfig};
use crate::error::{Error, Result};
use crate::symfun::{CurvatureVector, SumHessianParams};

pub const FD_STEP: f64 = 1e-4;
pub const MIN_EIGEN_GAP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiRenCheck {
    /// Second derivative of `t ↦ S_n(diag(λ) + tX)` at 0 by finite differences.
    pub finite_difference: f64,
    /// `Σ_{p≠q} S^{pp,qq} X_pp X_qq − Σ_{p≠q} S^{pp,qq} X_pq²`.
    pub decomposition: f64,
    pub residual: f64,
}

/// Compares the spectral second derivative of the operator at `diag(λ)`
/// with its decomposition into diagonal and off-diagonal parts.
///
/// The finite-difference side differentiates the directional derivative
/// `φ(t) = ⟨∇S_n(diag(λ) + tX), X⟩` (matrix gradient from the Newton
/// tensors) with central differences at steps `h` and `h/2`, combined as
/// `(4 D(h/2) − D(h)) / 3`.
pub fn liren_decomposition_check(lam: &CurvatureVector, x: &DMatrix<f64>, p: &SumHessianParams) -> Result<LiRenCheck> {
    let l = lam.as_slice();
    let n = l.len();
    if x.nrows() != n || x.ncols() != n {
        return Err(Error::Domain(format!("direction must be {n}x{n}")));
    }
    let scale = x.amax().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (x[(i, j)] - x[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::Domain(format!("direction is not symmetric at ({i}, {j})")));
            }
        }
    }
    let mut sorted = l.to_vec();
    sorted.sort_by(f64::total_cmp);
    if let Some(gap) = sorted.windows(2).map(|w| w[1] - w[0]).reduce(f64::min) {
        if gap < MIN_EIGEN_GAP {
            return Err(Error::Precondition(format!(
                "eigenvalue gap {gap:.3e} is below {MIN_EIGEN_GAP:.0e}"
            )));
        }
    }
    let op = p.operator();
    let a = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(l));
    let phi = |t: f64| -> Result<f64> {
        let m = &a + x * t;
        let g = op.matrix_eval(&m)?.gradient;
        Ok(g.component_mul(x).sum())
    };
    let d = |h: f64| -> Result<f64> { Ok((phi(h)? - phi(-h)?) / (2.0 * h)) };
    let finite_difference = (4.0 * d(FD_STEP / 2.0)? - d(FD_STEP)?) / 3.0;
    let hess = op.eval_bundle(l).hessian;
    let mut decomposition = 0.0;
    for pi in 0..n {
        for q in 0..n {
            if pi != q {
                decomposition += hess[(pi, q)] * (x[(pi, pi)] * x[(q, q)] - x[(pi, q)] * x[(pi, q)]);
            }
        }
    }
    Ok(LiRenCheck {
        finite_difference,
        decomposition,
        residual: (finite_difference - decomposition).abs(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiRenScan {
    pub n: usize,
    pub alpha: f64,
    pub instances: usize,
    /// Cone samples dropped for an eigenvalue gap below `min_gap`.
    pub skipped_gap: usize,
    pub min_gap: f64,
    pub max_residual: f64,
    pub worst_lam: Vec<f64>,
}

/// Runs the check on cone samples with pairwise gaps `≥ min_gap` and random
/// symmetric directions with entries in `[−1, 1]`.
pub fn liren_scan(cfg: &SampleConfig, p: &SumHessianParams, min_gap: f64, workers: usize) -> Result<LiRenScan> {
    let n = p.n;
    let (samples, _) = cone_samples(cfg, n, p.operator(), workers)?;
    let eligible: Vec<&Vec<f64>> = samples
        .iter()
        .filter(|l| l.windows(2).all(|w| w[0] - w[1] >= min_gap))
        .collect();
    if eligible.is_empty() {
        return Err(Error::Sampling(format!("no sample with eigenvalue gap >= {min_gap}")));
    }
    let checks = parallel_map(workers, eligible.len(), |k| -> Result<(f64, usize)> {
        let mut rng = sample_rng(cfg.seed ^ 0x5eed_11e0, k);
        let mut x = DMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.random_range(-1.0..1.0);
                x[(i, j)] = v;
                x[(j, i)] = v;
            }
        }
        let lam = CurvatureVector::new(eligible[k as usize].clone())?;
        Ok((liren_decomposition_check(&lam, &x, p)?.residual, k as usize))
    })?;
    let mut worst = (0.0f64, 0usize);
    for c in checks {
        let (r, k) = c?;
        if r > worst.0 {
            worst = (r, k);
        }
    }
    Ok(LiRenScan {
        n,
        alpha: p.alpha,
        instances: eligible.len(),
        skipped_gap: samples.len() - eligible.len(),
        min_gap,
        max_residual: worst.0,
        worst_lam: eligible[worst.1].clone(),
    })
}
