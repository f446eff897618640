use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::symfun::SumHessian;

/// Budget and box for seeded cone sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub count: usize,
    /// Per-coordinate interval; `None` selects [`default_interval`].
    pub interval: Option<[f64; 2]>,
    pub seed: u64,
    /// Rejection-sample into `Γ̃_n`.
    pub cone_filter: bool,
    /// Draws allowed per sample before it is abandoned.
    pub max_tries: usize,
}

impl SampleConfig {
    pub fn new(count: usize, seed: u64) -> Self {
        Self {
            count,
            interval: None,
            seed,
            cone_filter: true,
            max_tries: 10_000,
        }
    }

    pub fn with_interval(mut self, lo: f64, hi: f64) -> Self {
        self.interval = Some([lo, hi]);
        self
    }

    pub fn interval_for(&self, alpha: f64) -> [f64; 2] {
        self.interval.unwrap_or_else(|| default_interval(alpha))
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::Sampling("sample count must be positive".into()));
        }
        if self.max_tries == 0 {
            return Err(Error::Sampling("max_tries must be positive".into()));
        }
        if let Some([lo, hi]) = self.interval {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::Sampling(format!("invalid sampling interval [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// `[−1/α + 0.05, 5]`, or `[−5, 5]` when `α = 0`.
pub fn default_interval(alpha: f64) -> [f64; 2] {
    if alpha > 0.0 {
        [-1.0 / alpha + 0.05, 5.0]
    } else {
        [-5.0, 5.0]
    }
}

/// Generator for sample `index`: the seed selects the key and the index the
/// stream, so results do not depend on how samples are split over workers.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Point of the box, rejection-sampled into `Γ̃_n` when `filter` is set.
/// Returns `None` when `max_tries` draws all fall outside.
pub fn draw_point(
    rng: &mut impl Rng,
    n: usize,
    [lo, hi]: [f64; 2],
    op: SumHessian,
    filter: bool,
    max_tries: usize,
) -> Option<Vec<f64>> {
    for _ in 0..max_tries {
        let lam: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        if !filter || op.cone_membership(&lam, 0.0).admissible {
            return Some(lam);
        }
    }
    None
}

/// Unit vector from normalized Gaussian draws.
pub fn draw_unit(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

pub fn sort_desc(v: &mut [f64]) {
    v.sort_by(|a, b| b.total_cmp(a));
}

/// Runs `f(index)` for every index on a pool of `workers` threads and
/// returns the results in index order.
pub fn parallel_map<T: Send>(workers: usize, count: usize, f: impl Fn(u64) -> T + Sync + Send) -> Result<Vec<T>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Parameter(format!("cannot build worker pool: {e}")))?;
    Ok(pool.install(|| (0..count as u64).into_par_iter().map(&f).collect()))
}

/// Accepted cone samples, each sorted descending, in index order, with the
/// number of abandoned indices.
pub fn cone_samples(cfg: &SampleConfig, n: usize, op: SumHessian, workers: usize) -> Result<(Vec<Vec<f64>>, usize)> {
    cfg.validate()?;
    let interval = cfg.interval_for(op.alpha);
    let drawn = parallel_map(workers, cfg.count, |i| {
        let mut rng = sample_rng(cfg.seed, i);
        draw_point(&mut rng, n, interval, op, cfg.cone_filter, cfg.max_tries).map(|mut v| {
            sort_desc(&mut v);
            v
        })
    })?;
    let abandoned = drawn.iter().filter(|d| d.is_none()).count();
    let accepted: Vec<Vec<f64>> = drawn.into_iter().flatten().collect();
    if accepted.is_empty() {
        return Err(Error::Sampling(format!(
            "no sample accepted out of {} (interval {interval:?})",
            cfg.count
        )));
    }
    Ok((accepted, abandoned))
}
