use serde::Serialize;

use super::sampling::{cone_samples, SampleConfig};
use crate::error::{Error, Result};
use crate::symfun::{CurvatureVector, SumHessian, SumHessianParams};

fn rel(abs: f64, scale: f64) -> f64 {
    abs / scale.max(f64::MIN_POSITIVE)
}

/// Residuals of the first- and second-derivative formulas and of the
/// deleted-entry identities at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma21Residuals {
    /// `S^{ii} = S_{n-1}(λ|i)` against the exact difference in `λ_i`.
    pub gradient_rel: f64,
    /// `S^{ii,jj} = S_{n-2}(λ|ij)`, `i ≠ j`, against exact mixed differences.
    pub hessian_rel: f64,
    /// `max |S^{ii,ii}|`.
    pub hessian_diagonal_abs: f64,
    pub expansion_rel: f64,
    pub deleted_sum_rel: f64,
    pub euler_rel: f64,
}

impl Lemma21Residuals {
    pub fn max_rel(&self) -> f64 {
        [
            self.gradient_rel,
            self.hessian_rel,
            self.hessian_diagonal_abs,
            self.expansion_rel,
            self.deleted_sum_rel,
            self.euler_rel,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `S_n` is affine in each entry, so `∂_i S_n = S_n(λ_i = 1) − S_n(λ_i = 0)`
/// and the mixed partials are exact second differences of the same kind.
pub fn lemma21_residuals(lam: &[f64], op: SumHessian) -> Lemma21Residuals {
    let n = lam.len();
    let bundle = op.eval_bundle(lam);
    let with = |fixed: &[(usize, f64)]| {
        let mut x = lam.to_vec();
        for &(i, v) in fixed {
            x[i] = v;
        }
        op.value(&x)
    };
    let mut gradient_rel: f64 = 0.0;
    let mut hessian_rel: f64 = 0.0;
    let mut hessian_diagonal_abs: f64 = 0.0;
    for i in 0..n {
        let (a, b) = (with(&[(i, 1.0)]), with(&[(i, 0.0)]));
        gradient_rel = gradient_rel.max(rel((bundle.gradient[i] - (a - b)).abs(), a.abs() + b.abs()));
        hessian_diagonal_abs = hessian_diagonal_abs.max(bundle.hessian[(i, i)].abs());
        for j in 0..n {
            if i == j {
                continue;
            }
            let terms = [
                with(&[(i, 1.0), (j, 1.0)]),
                with(&[(i, 1.0), (j, 0.0)]),
                with(&[(i, 0.0), (j, 1.0)]),
                with(&[(i, 0.0), (j, 0.0)]),
            ];
            let exact = terms[0] - terms[1] - terms[2] + terms[3];
            let scale: f64 = terms.iter().map(|t| t.abs()).sum();
            hessian_rel = hessian_rel.max(rel((bundle.hessian[(i, j)] - exact).abs(), scale));
        }
    }
    let ids = op.identity_residuals(lam);
    Lemma21Residuals {
        gradient_rel,
        hessian_rel,
        hessian_diagonal_abs,
        expansion_rel: ids.expansion_rel,
        deleted_sum_rel: ids.deleted_sum_rel,
        euler_rel: ids.euler_rel,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityScan {
    pub n: usize,
    pub alpha: f64,
    pub samples: usize,
    /// Componentwise maxima over samples.
    pub max: Lemma21Residuals,
    pub worst_sample: Vec<f64>,
}

pub fn identity_scan(cfg: &SampleConfig, n: usize, op: SumHessian, workers: usize) -> Result<IdentityScan> {
    let (samples, _) = cone_samples(cfg, n, op, workers)?;
    let mut max = Lemma21Residuals {
        gradient_rel: 0.0,
        hessian_rel: 0.0,
        hessian_diagonal_abs: 0.0,
        expansion_rel: 0.0,
        deleted_sum_rel: 0.0,
        euler_rel: 0.0,
    };
    let mut worst = (f64::NEG_INFINITY, Vec::new());
    for lam in &samples {
        let r = lemma21_residuals(lam, op);
        max.gradient_rel = max.gradient_rel.max(r.gradient_rel);
        max.hessian_rel = max.hessian_rel.max(r.hessian_rel);
        max.hessian_diagonal_abs = max.hessian_diagonal_abs.max(r.hessian_diagonal_abs);
        max.expansion_rel = max.expansion_rel.max(r.expansion_rel);
        max.deleted_sum_rel = max.deleted_sum_rel.max(r.deleted_sum_rel);
        max.euler_rel = max.euler_rel.max(r.euler_rel);
        if r.max_rel() > worst.0 {
            worst = (r.max_rel(), lam.clone());
        }
    }
    Ok(IdentityScan {
        n,
        alpha: op.alpha,
        samples: samples.len(),
        max,
        worst_sample: worst.1,
    })
}

fn check_sorted(lam: &[f64]) -> Result<()> {
    if lam.windows(2).all(|w| w[0] >= w[1]) {
        Ok(())
    } else {
        Err(Error::Precondition(format!("{lam:?} is not sorted descending")))
    }
}

/// `S_n^{ii}(λ) λ_i / S_n(λ)` with the 1-based index `i`. Indices up to `n`
/// are accepted; the positivity bound only concerns `i ≤ n − 1`.
pub fn lemma22_ratio(lam: &CurvatureVector, p: &SumHessianParams, i: usize) -> Result<f64> {
    let x = lam.as_slice();
    let n = x.len();
    if !(1..=n).contains(&i) {
        return Err(Error::Parameter(format!("index {i} outside 1..={n}")));
    }
    check_sorted(x)?;
    let op = p.operator();
    let verdict = op.cone_membership(x, 0.0);
    if !verdict.admissible {
        return Err(Error::Domain(format!("{x:?} is not admissible: {:?}", verdict.witness)));
    }
    if i < n && x[i - 1] <= 0.0 {
        return Err(Error::Domain(format!(
            "λ_{i} = {} ≤ 0 inside the admissible cone",
            x[i - 1]
        )));
    }
    Ok(ratio(x, op, i - 1))
}

fn ratio(x: &[f64], op: SumHessian, k: usize) -> f64 {
    let b = op.eval_bundle(x);
    b.gradient[k] * x[k] / b.value
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaWitness {
    pub lam: Vec<f64>,
    /// 1-based index.
    pub i: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThetaScan {
    pub n: usize,
    pub alpha: f64,
    pub accepted: usize,
    pub abandoned: usize,
    /// Minimum ratio over samples and `i ≤ n − 1`.
    pub theta: f64,
    pub worst: ThetaWitness,
    /// Ratios `≤ 0` for `i ≤ n − 1`; any is an anomaly.
    pub nonpositive_count: usize,
    /// Minimum ratio for each `i = 1, …, n`.
    pub per_index_min: Vec<f64>,
    /// The `i = n` ratio, reported without a sign claim.
    pub last_index_min: f64,
    pub last_index_max: f64,
    pub last_index_nonpositive: usize,
}

/// Empirical `θ` from seeded cone samples.
pub fn theta_scan(cfg: &SampleConfig, p: &SumHessianParams, workers: usize) -> Result<ThetaScan> {
    if !cfg.cone_filter {
        return Err(Error::Precondition("theta scan requires cone filtering".into()));
    }
    let n = p.n;
    let op = p.operator();
    let (samples, abandoned) = cone_samples(cfg, n, op, workers)?;
    let mut per_index_min = vec![f64::INFINITY; n];
    let mut last_index_max = f64::NEG_INFINITY;
    let mut nonpositive_count = 0;
    let mut last_index_nonpositive = 0;
    let mut worst = ThetaWitness {
        lam: Vec::new(),
        i: 0,
        ratio: f64::INFINITY,
    };
    for lam in &samples {
        for k in 0..n {
            let r = ratio(lam, op, k);
            per_index_min[k] = per_index_min[k].min(r);
            if k + 1 == n {
                last_index_max = last_index_max.max(r);
                if r <= 0.0 {
                    last_index_nonpositive += 1;
                }
                continue;
            }
            if !(r > 0.0) {
                nonpositive_count += 1;
            }
            if !(r >= worst.ratio) {
                worst = ThetaWitness {
                    lam: lam.clone(),
                    i: k + 1,
                    ratio: r,
                };
            }
        }
    }
    Ok(ThetaScan {
        n,
        alpha: p.alpha,
        accepted: samples.len(),
        abandoned,
        theta: worst.ratio,
        worst,
        nonpositive_count,
        last_index_min: per_index_min[n - 1],
        per_index_min,
        last_index_max,
        last_index_nonpositive,
    })
}

/// `λ ∈ Γ̃_n ⟹ min_i λ_i > −1/α`.
pub fn kappa_floor_check(lam: &CurvatureVector, p: &SumHessianParams) -> Result<bool> {
    if p.alpha <= 0.0 {
        return Err(Error::Precondition("the curvature floor needs alpha > 0".into()));
    }
    let admissible = p.operator().cone_membership(lam.as_slice(), 0.0).admissible;
    Ok(!admissible || lam.min() > -1.0 / p.alpha)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FloorScan {
    pub n: usize,
    pub alpha: f64,
    pub interval: [f64; 2],
    pub admissible_samples: usize,
    pub holds: usize,
    /// Smallest `min_i λ_i + 1/α` seen.
    pub min_gap: f64,
    pub counterexample: Option<Vec<f64>>,
}

/// Scans admissible samples drawn from `cfg` (whose interval should extend
/// below `−1/α` for the check to be informative).
pub fn kappa_floor_scan(cfg: &SampleConfig, p: &SumHessianParams, workers: usize) -> Result<FloorScan> {
    let op = p.operator();
    let (samples, _) = cone_samples(cfg, p.n, op, workers)?;
    let mut holds = 0;
    let mut min_gap = f64::INFINITY;
    let mut counterexample = None;
    for lam in &samples {
        let cv = CurvatureVector::new(lam.clone())?;
        if kappa_floor_check(&cv, p)? {
            holds += 1;
        } else if counterexample.is_none() {
            counterexample = Some(lam.clone());
        }
        min_gap = min_gap.min(cv.min() + 1.0 / p.alpha);
    }
    Ok(FloorScan {
        n: p.n,
        alpha: p.alpha,
        interval: cfg.interval_for(p.alpha),
        admissible_samples: samples.len(),
        holds,
        min_gap,
        counterexample,
    })
}
