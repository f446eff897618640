//! Elementary symmetric polynomials and the sum Hessian operator
//! `S_n(λ) = σ_{n-1}(λ) + α σ_n(λ)`.
//!
//! `σ_k` is evaluated from the coefficients of `∏ (1 + λ_i t)`, built one
//! factor at a time, which costs `O(n²)` and avoids the cancellation of
//! subset enumeration. Derivatives use the deleted-entry notation:
//! `S_k(λ|i)` is `σ_{k-1} + α σ_k` of `λ` with entry `i` removed, and
//! `σ_j` of a vector shorter than `j` is zero.
//!
//! The matrix form works directly with the characteristic-polynomial
//! invariants of a symmetric matrix through Newton tensors, so it stays
//! smooth when eigenvalues collide.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Principal curvatures (or any point of `R^n`) with `n ≥ 2`.
///
/// Stored order is preserved; [`CurvatureVector::sorted_desc`] gives the
/// canonical `κ₁ ≥ … ≥ κ_n` view.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvatureVector {
    entries: Vec<f64>,
}

impl CurvatureVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(Error::Domain(format!(
                "curvature vector needs at least 2 entries, got {}",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("entry {bad} is not finite")));
        }
        Ok(Self { entries })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sorted_desc(&self) -> Vec<f64> {
        let mut v = self.entries.clone();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }

    pub fn min(&self) -> f64 {
        self.entries.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.entries.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Dimension, coefficient and right-hand side of `S_n(κ) = σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumHessianParams {
    pub n: usize,
    pub alpha: f64,
    pub sigma: f64,
}

impl SumHessianParams {
    /// Validates `n ≥ 2`, `α ≥ 0` and `0 < σ < n`.
    pub fn new(n: usize, alpha: f64, sigma: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!("n must be at least 2, got {n}")));
        }
        if !(alpha.is_finite() && alpha >= 0.0) {
            return Err(Error::Parameter(format!("alpha must be finite and >= 0, got {alpha}")));
        }
        if !(sigma > 0.0 && sigma < n as f64) {
            return Err(Error::Parameter(format!(
                "sigma must lie in (0, {n}), got {sigma}"
            )));
        }
        Ok(Self { n, alpha, sigma })
    }

    /// `α = 0` reduces the operator to `σ_{n-1}`; kept for oracle comparisons.
    pub fn is_degenerate(&self) -> bool {
        self.alpha == 0.0
    }

    pub fn operator(&self) -> SumHessian {
        SumHessian { alpha: self.alpha }
    }
}

/// Coefficients `σ_0, …, σ_m` of `∏ (1 + x_i t)`.
pub fn elementary_all(x: &[f64]) -> Vec<f64> {
    let mut e = vec![0.0; x.len() + 1];
    e[0] = 1.0;
    for (m, &xi) in x.iter().enumerate() {
        for k in (1..=m + 1).rev() {
            e[k] += xi * e[k - 1];
        }
    }
    e
}

/// `σ_k(x)`, zero when `k > x.len()`.
pub fn sigma_k(x: &[f64], k: usize) -> f64 {
    if k > x.len() {
        return 0.0;
    }
    elementary_all(x)[k]
}

/// `σ_k(λ)` with range checking, `σ_0 = 1`.
pub fn elementary_sigma(lam: &CurvatureVector, k: usize) -> Result<f64> {
    if k > lam.len() {
        return Err(Error::Domain(format!(
            "k = {k} exceeds dimension {}",
            lam.len()
        )));
    }
    Ok(sigma_k(lam.as_slice(), k))
}

/// Copy of `x` with the listed indices removed.
pub(crate) fn deleted(x: &[f64], excluded: &[usize]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter(|(i, _)| !excluded.contains(i))
        .map(|(_, v)| *v)
        .collect()
}

/// `σ_k(λ | excluded)`: the elementary polynomial of the subvector with the
/// excluded entries removed.
pub fn sigma_excluding(lam: &CurvatureVector, k: usize, excluded: &[usize]) -> Result<f64> {
    let n = lam.len();
    for (pos, &i) in excluded.iter().enumerate() {
        if i >= n {
            return Err(Error::Domain(format!("excluded index {i} out of range 0..{n}")));
        }
        if excluded[..pos].contains(&i) {
            return Err(Error::Domain(format!("excluded index {i} repeated")));
        }
    }
    let rest = n - excluded.len();
    if k > rest {
        return Err(Error::Domain(format!(
            "k = {k} exceeds remaining dimension {rest}"
        )));
    }
    Ok(sigma_k(&deleted(lam.as_slice(), excluded), k))
}

/// The operator `S_k = σ_{k-1} + α σ_k` for a fixed coefficient `α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumHessian {
    pub alpha: f64,
}

/// Value, gradient `S_n^{ii}` and Hessian `S_n^{ii,jj}` at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalBundle {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
}

/// First defining inequality of `Γ̃_n` that fails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConeWitness {
    Sigma { k: usize, value: f64 },
    SumHessian { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConeVerdict {
    /// Largest `k` with `λ ∈ Γ_k`, zero if `σ_1 ≤ margin`.
    pub gamma_level: usize,
    /// `λ ∈ Γ̃_n`.
    pub admissible: bool,
    pub witness: Option<ConeWitness>,
}

/// Residuals of the deleted-entry identities
/// `S_n = λ_i S_{n-1}(λ|i) + S_n(λ|i)`, `Σ_i S_n(λ|i) = σ_{n-1}` and
/// `Σ_i λ_i S_{n-1}(λ|i) = n S_n − σ_{n-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdentityResiduals {
    pub expansion_abs: f64,
    pub expansion_rel: f64,
    pub deleted_sum_abs: f64,
    pub deleted_sum_rel: f64,
    pub euler_abs: f64,
    pub euler_rel: f64,
}

impl IdentityResiduals {
    pub fn max_abs(&self) -> f64 {
        self.expansion_abs.max(self.deleted_sum_abs).max(self.euler_abs)
    }

    pub fn max_rel(&self) -> f64 {
        self.expansion_rel.max(self.deleted_sum_rel).max(self.euler_rel)
    }
}

/// Value and matrix gradient `∂S_n/∂A_{ij}` of the operator on a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixEval {
    pub value: f64,
    pub gradient: DMatrix<f64>,
    /// `σ_0(A), …, σ_n(A)`.
    pub sigmas: Vec<f64>,
}

fn relative(abs: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        abs / scale
    } else {
        abs
    }
}

impl SumHessian {
    pub fn new(alpha: f64) -> Self {
        Self { alpha }
    }

    /// `S_k(x) = σ_{k-1}(x) + α σ_k(x)` with `σ_{-1} = 0`.
    pub fn s_k(&self, x: &[f64], k: usize) -> f64 {
        let e = elementary_all(x);
        let get = |j: usize| e.get(j).copied().unwrap_or(0.0);
        let lower = if k == 0 { 0.0 } else { get(k - 1) };
        lower + self.alpha * get(k)
    }

    /// `S_n(λ)` with `n = λ.len()`.
    pub fn value(&self, lam: &[f64]) -> f64 {
        self.s_k(lam, lam.len())
    }

    pub fn eval_bundle(&self, lam: &[f64]) -> EvalBundle {
        let n = lam.len();
        let gradient = (0..n)
            .map(|i| self.s_k(&deleted(lam, &[i]), n - 1))
            .collect();
        let mut hessian = DMatrix::zeros(n, n);
        if n >= 2 {
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = self.s_k(&deleted(lam, &[i, j]), n - 2);
                    hessian[(i, j)] = v;
                    hessian[(j, i)] = v;
                }
            }
        }
        EvalBundle {
            value: self.value(lam),
            gradient,
            hessian,
        }
    }

    /// Cone test with strict inequalities `σ_k > margin`, `S_n > margin`.
    pub fn cone_membership(&self, lam: &[f64], margin: f64) -> ConeVerdict {
        let n = lam.len();
        let e = elementary_all(lam);
        let mut gamma_level = 0;
        let mut witness = None;
        for (k, &s) in e.iter().enumerate().skip(1) {
            if s > margin {
                gamma_level = k;
            } else {
                witness = Some(ConeWitness::Sigma { k, value: s });
                break;
            }
        }
        let value = e[n - 1] + self.alpha * e[n];
        let in_lower_cone = gamma_level + 1 >= n;
        let admissible = in_lower_cone && value > margin;
        if in_lower_cone && !admissible {
            witness = Some(ConeWitness::SumHessian { value });
        }
        if admissible {
            witness = None;
        }
        ConeVerdict {
            gamma_level,
            admissible,
            witness,
        }
    }

    pub fn identity_residuals(&self, lam: &[f64]) -> IdentityResiduals {
        let n = lam.len();
        let s = self.value(lam);
        let sigma_nm1 = sigma_k(lam, n - 1);
        let mut expansion_abs: f64 = 0.0;
        let mut expansion_rel: f64 = 0.0;
        let mut deleted_sum = 0.0;
        let mut deleted_scale = sigma_nm1.abs();
        let mut euler = 0.0;
        let mut euler_scale = n as f64 * s.abs() + sigma_nm1.abs();
        for i in 0..n {
            let rest = deleted(lam, &[i]);
            let grad_i = self.s_k(&rest, n - 1);
            let del_i = self.s_k(&rest, n);
            let abs = (s - lam[i] * grad_i - del_i).abs();
            expansion_abs = expansion_abs.max(abs);
            expansion_rel =
                expansion_rel.max(relative(abs, s.abs() + (lam[i] * grad_i).abs() + del_i.abs()));
            deleted_sum += del_i;
            deleted_scale += del_i.abs();
            euler += lam[i] * grad_i;
            euler_scale += (lam[i] * grad_i).abs();
        }
        let deleted_sum_abs = (deleted_sum - sigma_nm1).abs();
        let euler_abs = (euler - n as f64 * s + sigma_nm1).abs();
        IdentityResiduals {
            expansion_abs,
            expansion_rel,
            deleted_sum_abs,
            deleted_sum_rel: relative(deleted_sum_abs, deleted_scale),
            euler_abs,
            euler_rel: relative(euler_abs, euler_scale),
        }
    }

    /// Operator value and matrix gradient on a symmetric matrix.
    ///
    /// Newton tensors `T_0 = I`, `σ_k = tr(A T_{k-1}) / k`,
    /// `T_k = σ_k I − A T_{k-1}` give `∂σ_k/∂A = T_{k-1}`.
    pub fn matrix_eval(&self, a: &DMatrix<f64>) -> Result<MatrixEval> {
        let n = a.nrows();
        if a.ncols() != n || n < 2 {
            return Err(Error::Domain(format!(
                "expected a square matrix of size >= 2, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        let scale = a.amax().max(1.0);
        for i in 0..n {
            for j in (i + 1)..n {
                if (a[(i, j)] - a[(j, i)]).abs() > 1e-12 * scale {
                    return Err(Error::Domain(format!(
                        "matrix not symmetric at ({i}, {j}): {} vs {}",
                        a[(i, j)],
                        a[(j, i)]
                    )));
                }
            }
        }
        let identity = DMatrix::<f64>::identity(n, n);
        let mut sigmas = vec![1.0; n + 1];
        let mut tensors = Vec::with_capacity(n + 1);
        tensors.push(identity.clone());
        for k in 1..=n {
            let at = a * &tensors[k - 1];
            sigmas[k] = at.trace() / k as f64;
            tensors.push(&identity * sigmas[k] - at);
        }
        let value = sigmas[n - 1] + self.alpha * sigmas[n];
        let gradient = &tensors[n - 2] + &tensors[n - 1] * self.alpha;
        Ok(MatrixEval {
            value,
            gradient,
            sigmas,
        })
    }
}

pub fn sum_hessian(lam: &CurvatureVector, p: &SumHessianParams) -> f64 {
    p.operator().value(lam.as_slice())
}

pub fn eval_bundle(lam: &CurvatureVector, p: &SumHessianParams) -> EvalBundle {
    p.operator().eval_bundle(lam.as_slice())
}

pub fn check_identities(lam: &CurvatureVector, p: &SumHessianParams) -> IdentityResiduals {
    p.operator().identity_residuals(lam.as_slice())
}

/// Strict membership (`τ_cone = 0`).
pub fn cone_membership(lam: &CurvatureVector, p: &SumHessianParams) -> ConeVerdict {
    p.operator().cone_membership(lam.as_slice(), 0.0)
}

pub fn matrix_sum_hessian(a: &DMatrix<f64>, p: &SumHessianParams) -> Result<MatrixEval> {
    p.operator().matrix_eval(a)
}
