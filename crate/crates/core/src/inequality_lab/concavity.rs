use serde::{Deserialize, Serialize};

use super::sampling::{draw_point, draw_unit, parallel_map, sample_rng, SampleConfig};
use crate::error::{Error, Result};
use crate::symfun::{CurvatureVector, SumHessian, SumHessianParams};

/// Data of one instance of the concavity inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcavityInstance {
    pub lam: CurvatureVector,
    pub xi: Vec<f64>,
    pub eps: f64,
    pub k: f64,
}

/// `λ₁ (K (Σ_j S^{jj} ξ_j)² − Σ_{p,q} S^{pp,qq} ξ_p ξ_q) − S^{11} ξ₁²
///  + (1 + ε) Σ_{j>1} S^{jj} ξ_j²` with `λ` sorted descending.
pub fn concavity_lhs(inst: &ConcavityInstance, p: &SumHessianParams) -> Result<f64> {
    let lam = inst.lam.as_slice();
    let n = lam.len();
    if inst.xi.len() != n || inst.xi.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("xi must hold {n} finite entries")));
    }
    if !(inst.eps > 0.0) || !(inst.k >= 0.0) || !inst.k.is_finite() {
        return Err(Error::Parameter(format!("need eps > 0 and finite K >= 0, got {} and {}", inst.eps, inst.k)));
    }
    if !lam.windows(2).all(|w| w[0] >= w[1]) {
        return Err(Error::Precondition(format!("{lam:?} is not sorted descending")));
    }
    let op = p.operator();
    let verdict = op.cone_membership(lam, 0.0);
    if !verdict.admissible {
        return Err(Error::Domain(format!("{lam:?} is not admissible: {:?}", verdict.witness)));
    }
    Ok(lhs(lam, &inst.xi, inst.eps, inst.k, op))
}

fn lhs(lam: &[f64], xi: &[f64], eps: f64, k: f64, op: SumHessian) -> f64 {
    let b = op.eval_bundle(lam);
    let n = lam.len();
    let linear: f64 = (0..n).map(|j| b.gradient[j] * xi[j]).sum();
    let mut quad = 0.0;
    for pi in 0..n {
        for q in 0..n {
            quad += b.hessian[(pi, q)] * xi[pi] * xi[q];
        }
    }
    let tail: f64 = (1..n).map(|j| b.gradient[j] * xi[j] * xi[j]).sum();
    lam[0] * (k * linear * linear - quad) - b.gradient[0] * xi[0] * xi[0] + (1.0 + eps) * tail
}

/// The left side as `base + K · slope`, with the sum of term magnitudes
/// used to scale the violation tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
struct LinearForm {
    base: f64,
    slope: f64,
    base_scale: f64,
}

impl LinearForm {
    fn new(lam: &[f64], xi: &[f64], eps: f64, op: SumHessian) -> Self {
        let b = op.eval_bundle(lam);
        let n = lam.len();
        let linear: f64 = (0..n).map(|j| b.gradient[j] * xi[j]).sum();
        let mut quad = 0.0;
        for pi in 0..n {
            for q in 0..n {
                quad += b.hessian[(pi, q)] * xi[pi] * xi[q];
            }
        }
        let first = b.gradient[0] * xi[0] * xi[0];
        let tail: f64 = (1..n).map(|j| b.gradient[j] * xi[j] * xi[j]).sum();
        Self {
            base: -lam[0] * quad - first + (1.0 + eps) * tail,
            slope: lam[0] * linear * linear,
            base_scale: (lam[0] * quad).abs() + first.abs() + (1.0 + eps) * tail.abs(),
        }
    }

    fn at(&self, k: f64) -> f64 {
        self.base + k * self.slope
    }

    fn scale(&self, k: f64) -> f64 {
        (self.base_scale + k * self.slope.abs()).max(1.0)
    }

    fn violated(&self, k: f64) -> bool {
        self.at(k) < -VIOLATION_TOL * self.scale(k)
    }

    /// Smallest `K` without violation, if any.
    fn k_needed(&self) -> Option<f64> {
        if !self.violated(0.0) {
            return Some(0.0);
        }
        if self.slope <= 0.0 {
            return None;
        }
        Some(-(self.base + VIOLATION_TOL * self.base_scale.max(1.0)) / (self.slope * (1.0 - VIOLATION_TOL)))
    }
}

/// A left side below `−1e−9 · max(1, Σ |terms|)` counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConcavityOptions {
    pub k_max: f64,
    /// Ratio between consecutive lattice values of `K`.
    pub lattice_ratio: f64,
    /// Smallest positive lattice value of `K`.
    pub k_min: f64,
    pub adversarial_starts: usize,
    pub adversarial_iters: usize,
    pub adversarial_step: f64,
    pub projection_margin: f64,
}

impl Default for ConcavityOptions {
    fn default() -> Self {
        Self {
            k_max: 1e6,
            lattice_ratio: 1.01,
            k_min: 1e-6,
            adversarial_starts: 10,
            adversarial_iters: 200,
            adversarial_step: 1e-2,
            projection_margin: 1e-6,
        }
    }
}

impl ConcavityOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.k_max > 0.0 && self.k_max.is_finite()) {
            return Err(Error::Parameter(format!("k_max must be > 0, got {}", self.k_max)));
        }
        if !(self.lattice_ratio > 1.0) {
            return Err(Error::Parameter("lattice_ratio must exceed 1".into()));
        }
        if !(self.k_min > 0.0 && self.k_min < self.k_max) {
            return Err(Error::Parameter("k_min must lie in (0, k_max)".into()));
        }
        if !(self.adversarial_step > 0.0 && self.projection_margin >= 0.0) {
            return Err(Error::Parameter("adversarial step must be > 0 and margin >= 0".into()));
        }
        Ok(())
    }

    /// `{0} ∪ {K_max · r^{-j}}` in increasing order, down to about `k_min`.
    pub fn lattice(&self) -> Vec<f64> {
        let steps = ((self.k_max / self.k_min).ln() / self.lattice_ratio.ln()).ceil() as i32;
        let mut out = vec![0.0];
        out.extend((0..=steps).rev().map(|j| self.k_max * self.lattice_ratio.powi(-j)));
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchStatus {
    NoCounterexampleFound,
    SearchFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Instance {
    pub lam: Vec<f64>,
    pub xi: Vec<f64>,
    pub lhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdversarialRecord {
    pub start: Instance,
    pub best: Instance,
    pub violated: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavitySearch {
    pub eps: f64,
    pub n: usize,
    pub alpha: f64,
    pub status: SearchStatus,
    pub label: String,
    /// Accepted `K`, or `None` when even `K_max` is violated.
    pub k: Option<f64>,
    pub k_max: f64,
    /// Smallest lattice `K` clean on the sampled instances.
    pub sampled_k: Option<f64>,
    pub sampled: usize,
    pub abandoned: usize,
    /// Sampled violations at the reported `K` (or at `K_max` on failure).
    pub violations: usize,
    pub adversarial_rounds: usize,
    /// Adversarial runs of the final round.
    pub adversarial: Vec<AdversarialRecord>,
    /// Instance with the smallest scaled left side at the reported `K`.
    pub worst_instance: Option<Instance>,
}

struct Sample {
    lam: Vec<f64>,
    xi: Vec<f64>,
    form: LinearForm,
}

fn draw_samples(cfg: &SampleConfig, p: &SumHessianParams, eps: f64, workers: usize) -> Result<(Vec<Sample>, usize)> {
    cfg.validate()?;
    let op = p.operator();
    let interval = cfg.interval_for(p.alpha);
    let drawn = parallel_map(workers, cfg.count, |i| {
        let mut rng = sample_rng(cfg.seed, i);
        let mut lam = draw_point(&mut rng, p.n, interval, op, true, cfg.max_tries)?;
        lam.sort_by(|a, b| b.total_cmp(a));
        let xi = draw_unit(&mut rng, p.n);
        let form = LinearForm::new(&lam, &xi, eps, op);
        Some(Sample { lam, xi, form })
    })?;
    let abandoned = drawn.iter().filter(|d| d.is_none()).count();
    let samples: Vec<Sample> = drawn.into_iter().flatten().collect();
    if samples.is_empty() {
        return Err(Error::Sampling(format!("no admissible sample out of {}", cfg.count)));
    }
    Ok((samples, abandoned))
}

struct Descent<'a> {
    op: SumHessian,
    eps: f64,
    k: f64,
    interval: [f64; 2],
    opts: &'a ConcavityOptions,
}

impl Descent<'_> {
    fn value(&self, lam: &[f64], xi: &[f64]) -> f64 {
        lhs(lam, xi, self.eps, self.k, self.op)
    }

    fn feasible(&self, lam: &[f64]) -> bool {
        self.op.cone_membership(lam, self.opts.projection_margin).admissible
    }

    /// Re-sorts `λ` (permuting `ξ` alike), normalizes `ξ`, clamps `λ` to
    /// the box and pulls it back toward `from` until it is admissible.
    fn project(&self, from: &[f64], lam: Vec<f64>, xi: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
        let [lo, hi] = self.interval;
        let lam: Vec<f64> = lam.into_iter().map(|v| v.clamp(lo, hi)).collect();
        let lam = if self.feasible(&lam) {
            lam
        } else {
            let (mut good, mut bad) = (0.0, 1.0);
            for _ in 0..60 {
                let mid = 0.5 * (good + bad);
                let trial: Vec<f64> = from.iter().zip(&lam).map(|(a, b)| a + mid * (b - a)).collect();
                if self.feasible(&trial) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            from.iter().zip(&lam).map(|(a, b)| a + good * (b - a)).collect()
        };
        let mut order: Vec<usize> = (0..lam.len()).collect();
        order.sort_by(|&a, &b| lam[b].total_cmp(&lam[a]));
        let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
        (
            order.iter().map(|&i| lam[i]).collect(),
            order.iter().map(|&i| xi[i] / norm).collect(),
        )
    }

    fn run(&self, lam0: &[f64], xi0: &[f64]) -> AdversarialRecord {
        let n = lam0.len();
        let start = Instance {
            lam: lam0.to_vec(),
            xi: xi0.to_vec(),
            lhs: self.value(lam0, xi0),
        };
        let (mut lam, mut xi) = (lam0.to_vec(), xi0.to_vec());
        let mut best = start.clone();
        let mut violated = LinearForm::new(lam0, xi0, self.eps, self.op).violated(self.k);
        let fd = 1e-7;
        for _ in 0..self.opts.adversarial_iters {
            let mut grad = vec![0.0; 2 * n];
            for (c, g) in grad.iter_mut().enumerate() {
                let (mut lp, mut xp) = (lam.clone(), xi.clone());
                let (mut lm, mut xm) = (lam.clone(), xi.clone());
                if c < n {
                    lp[c] += fd;
                    lm[c] -= fd;
                } else {
                    xp[c - n] += fd;
                    xm[c - n] -= fd;
                }
                *g = (self.value(&lp, &xp) - self.value(&lm, &xm)) / (2.0 * fd);
            }
            let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
            if !(gnorm > 0.0) {
                break;
            }
            let step = self.opts.adversarial_step / gnorm;
            let lam_t: Vec<f64> = (0..n).map(|i| lam[i] - step * grad[i]).collect();
            let xi_t: Vec<f64> = (0..n).map(|i| xi[i] - step * grad[n + i]).collect();
            let (l, x) = self.project(&lam, lam_t, xi_t);
            lam = l;
            xi = x;
            let form = LinearForm::new(&lam, &xi, self.eps, self.op);
            let v = form.at(self.k);
            if form.violated(self.k) {
                violated = true;
            }
            if v < best.lhs {
                best = Instance {
                    lam: lam.clone(),
                    xi: xi.clone(),
                    lhs: v,
                };
            }
        }
        AdversarialRecord { start, best, violated }
    }
}

/// Smallest `K` on a fixed lattice with no violation among the sampled
/// instances and in projected descent on the left side started from the
/// worst of them. The result is evidence, not proof.
pub fn concavity_search_k(
    eps: f64,
    cfg: &SampleConfig,
    p: &SumHessianParams,
    opts: &ConcavityOptions,
    workers: usize,
) -> Result<ConcavitySearch> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::Parameter(format!("eps must be > 0, got {eps}")));
    }
    opts.validate()?;
    let (samples, abandoned) = draw_samples(cfg, p, eps, workers)?;
    let lattice = opts.lattice();
    let violations = |k: f64| samples.iter().filter(|s| s.form.violated(k)).count();
    let worst_at = |k: f64| -> Instance {
        let s = samples
            .iter()
            .min_by(|a, b| (a.form.at(k) / a.form.scale(k)).total_cmp(&(b.form.at(k) / b.form.scale(k))))
            .expect("samples are non-empty");
        Instance {
            lam: s.lam.clone(),
            xi: s.xi.clone(),
            lhs: s.form.at(k),
        }
    };
    let mut report = ConcavitySearch {
        eps,
        n: p.n,
        alpha: p.alpha,
        status: SearchStatus::SearchFailure,
        label: "search failure: violations persist at K_max".into(),
        k: None,
        k_max: opts.k_max,
        sampled_k: None,
        sampled: samples.len(),
        abandoned,
        violations: 0,
        adversarial_rounds: 0,
        adversarial: Vec::new(),
        worst_instance: None,
    };
    let top = lattice.len() - 1;
    if violations(lattice[top]) > 0 {
        report.violations = violations(lattice[top]);
        report.worst_instance = Some(worst_at(lattice[top]));
        return Ok(report);
    }
    let (mut lo, mut hi) = (0usize, top);
    if violations(lattice[0]) == 0 {
        hi = 0;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if violations(lattice[mid]) == 0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut idx = hi;
    report.sampled_k = Some(lattice[idx]);
    let descent_at = |k: f64| Descent {
        op: p.operator(),
        eps,
        k,
        interval: cfg.interval_for(p.alpha),
        opts,
    };
    loop {
        let k = lattice[idx];
        let mut order: Vec<usize> = (0..samples.len()).collect();
        order.sort_by(|&a, &b| {
            let (fa, fb) = (&samples[a].form, &samples[b].form);
            (fa.at(k) / fa.scale(k)).total_cmp(&(fb.at(k) / fb.scale(k))).then(a.cmp(&b))
        });
        let starts: Vec<usize> = order.into_iter().take(opts.adversarial_starts).collect();
        let descent = descent_at(k);
        let records = parallel_map(workers, starts.len(), |j| {
            let s = &samples[starts[j as usize]];
            descent.run(&s.lam, &s.xi)
        })?;
        report.adversarial_rounds += 1;
        let needed = records
            .iter()
            .filter(|r| r.violated)
            .map(|r| LinearForm::new(&r.best.lam, &r.best.xi, eps, p.operator()).k_needed())
            .try_fold(k, |acc, need| need.map(|v| acc.max(v)));
        let any_violation = records.iter().any(|r| r.violated);
        report.adversarial = records;
        if !any_violation {
            report.status = SearchStatus::NoCounterexampleFound;
            report.label = "no counterexample found".into();
            report.k = Some(k);
            report.violations = violations(k);
            let mut worst = worst_at(k);
            for r in &report.adversarial {
                if r.best.lhs < worst.lhs {
                    worst = r.best.clone();
                }
            }
            report.worst_instance = Some(worst);
            return Ok(report);
        }
        let next = match needed {
            Some(v) => lattice.iter().position(|&l| l > v.max(k)).unwrap_or(usize::MAX),
            None => usize::MAX,
        };
        if next > top {
            report.worst_instance = report
                .adversarial
                .iter()
                .map(|r| r.best.clone())
                .min_by(|a, b| a.lhs.total_cmp(&b.lhs));
            return Ok(report);
        }
        idx = next;
    }
}
