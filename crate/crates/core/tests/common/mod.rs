#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `σ_k` by summing over every `k`-subset.
pub fn brute_sigma(x: &[f64], k: usize) -> f64 {
    let n = x.len();
    if k > n {
        return 0.0;
    }
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (0..n).filter(|i| m >> i & 1 == 1).map(|i| x[i]).product::<f64>())
        .sum()
}

/// `σ_{m-1} + α σ_m` with `m` fixed by the caller.
pub fn brute_s(x: &[f64], m: usize, alpha: f64) -> f64 {
    let lower = if m == 0 { 0.0 } else { brute_sigma(x, m - 1) };
    lower + alpha * brute_sigma(x, m)
}

/// Same sum with every monomial replaced by its absolute value.
pub fn brute_s_scale(x: &[f64], m: usize, alpha: f64) -> f64 {
    let abs: Vec<f64> = x.iter().map(|v| v.abs()).collect();
    brute_s(&abs, m, alpha.abs())
}

pub fn without(x: &[f64], idx: &[usize]) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter(|(i, _)| !idx.contains(i))
        .map(|(_, v)| *v)
        .collect()
}

/// Strict membership in `Γ̃_n` from brute-force sums.
pub fn brute_admissible(x: &[f64], alpha: f64) -> bool {
    let n = x.len();
    (1..n).all(|k| brute_sigma(x, k) > 0.0) && brute_s(x, n, alpha) > 0.0
}

/// Admissible point drawn uniformly from the box by rejection.
pub fn cone_point(rng: &mut impl Rng, n: usize, alpha: f64, lo: f64, hi: f64) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(lo..hi)).collect();
        if brute_admissible(&x, alpha) {
            return x;
        }
    }
}

/// `σ_k(A)` as the sum of principal `k × k` minors.
pub fn minor_sigma(a: &DMatrix<f64>, k: usize) -> f64 {
    let n = a.nrows();
    if k == 0 {
        return 1.0;
    }
    (0u32..(1 << n))
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| {
            let idx: Vec<usize> = (0..n).filter(|i| m >> i & 1 == 1).collect();
            DMatrix::from_fn(k, k, |r, c| a[(idx[r], idx[c])]).determinant()
        })
        .sum()
}

pub fn minor_s(a: &DMatrix<f64>, alpha: f64) -> f64 {
    let n = a.nrows();
    minor_sigma(a, n - 1) + alpha * minor_sigma(a, n)
}

/// Orthogonal matrix from Gram-Schmidt on uniform entries.
pub fn random_orthogonal(rng: &mut impl Rng, n: usize) -> DMatrix<f64> {
    loop {
        let mut q = DMatrix::from_fn(n, n, |_, _| rng.random_range(-1.0..1.0));
        let mut ok = true;
        for j in 0..n {
            for k in 0..j {
                let d = q.column(j).dot(&q.column(k));
                let col_k = q.column(k).into_owned();
                q.column_mut(j).axpy(-d, &col_k, 1.0);
            }
            let norm = q.column(j).norm();
            if norm < 1e-3 {
                ok = false;
                break;
            }
            q.column_mut(j).scale_mut(1.0 / norm);
        }
        if ok {
            return q;
        }
    }
}

/// Root of `f` in `[lo, hi]` by bisection; `f(lo)` and `f(hi)` must differ in sign.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Umbilic sphere `u = √(r² − |x|²) − c r` of curvature `c` meeting
/// `u = ε` on `|x| = R`; returns `(depth, radius)`.
pub fn cap_through(c: f64, big_r: f64, eps: f64) -> (f64, f64) {
    let g = |r: f64| (r * r - big_r * big_r).max(0.0).sqrt() - c * r - eps;
    let mut hi = big_r + eps + 1.0;
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let r = bisect(g, big_r.max(eps), hi);
    (c * r, r)
}

/// Curvature `c > 0` of the umbilic solution: `n c^{n-1} + α c^n = σ`.
pub fn umbilic_c(n: usize, alpha: f64, sigma: f64) -> f64 {
    let f = |c: f64| n as f64 * c.powi(n as i32 - 1) + alpha * c.powi(n as i32) - sigma;
    let mut hi = 1.0;
    while f(hi) < 0.0 {
        hi *= 2.0;
    }
    bisect(f, 0.0, hi)
}

/// Least-squares slope of `ln e` against `ln h`.
pub fn fitted_order(hs: &[f64], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}
