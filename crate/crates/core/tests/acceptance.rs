//! Acceptance suite: one PASS/FAIL line per criterion; exits non-zero if any
//! criterion fails.

mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use common::*;
use sumhess::hypgeom::{
    analytic_surface, angle_gradient_check, kappa_error, weighted_laplacian_check, Domain, GeometryField, GridSpec,
    SurfaceKind,
};
use sumhess::inequality_lab::{
    cone_samples, concavity_lhs, concavity_search_k, identity_scan, kappa_floor_scan, lemma22_ratio,
    liren_decomposition_check, theta_scan, ConcavityInstance, ConcavityOptions, SampleConfig, SearchStatus,
};
use sumhess::solver::{
    continuation, newton_solve, residual, Discretization, PlateauProblem, Schedule, ContinuationParameter,
    SolverConfig,
};
use sumhess::symfun::{CurvatureVector, SumHessian, SumHessianParams};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn timed(limit: Duration, f: impl FnOnce() -> Verdict) -> Verdict {
    let t = Instant::now();
    let v = f();
    let elapsed = t.elapsed();
    Verdict {
        pass: v.pass && elapsed < limit,
        detail: format!("{}; {:.2?} (limit {:?})", v.detail, elapsed, limit),
    }
}

fn rel(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / scale.max(f64::MIN_POSITIVE)
}

fn lemma21_suite() -> Verdict {
    timed(Duration::from_secs(10), || {
        let mut worst: f64 = 0.0;
        let mut lib_worst: f64 = 0.0;
        let mut count = 0;
        for n in [2, 3, 4] {
            for alpha in [0.5, 1.0, 2.0] {
                let op = SumHessian::new(alpha);
                let cfg = SampleConfig::new(1000, 2101 + n as u64);
                let (samples, _) = cone_samples(&cfg, n, op, 1).unwrap();
                for x in &samples {
                    count += 1;
                    let b = op.eval_bundle(x);
                    let s = brute_s(x, n, alpha);
                    let s_scale = brute_s_scale(x, n, alpha);
                    worst = worst.max(rel(b.value, s, s_scale));
                    let mut euler = 0.0;
                    let mut euler_scale = 0.0;
                    let mut deleted_sum = 0.0;
                    let mut deleted_scale = 0.0;
                    for i in 0..n {
                        let xi = without(x, &[i]);
                        let g = brute_s(&xi, n - 1, alpha);
                        let g_scale = brute_s_scale(&xi, n - 1, alpha);
                        worst = worst.max(rel(b.gradient[i], g, g_scale));
                        worst = worst.max(b.hessian[(i, i)].abs());
                        for j in 0..n {
                            if j != i {
                                let xij = without(x, &[i, j]);
                                let hh = brute_s(&xij, n - 2, alpha);
                                let h_scale = brute_s_scale(&xij, n - 2, alpha);
                                worst = worst.max(rel(b.hessian[(i, j)], hh, h_scale));
                            }
                        }
                        let tail = brute_s(&xi, n, alpha);
                        worst = worst.max(rel(s, x[i] * b.gradient[i] + tail, s_scale));
                        deleted_sum += tail;
                        deleted_scale += brute_s_scale(&xi, n, alpha);
                        euler += x[i] * b.gradient[i];
                        euler_scale += (x[i] * b.gradient[i]).abs();
                    }
                    let sig = brute_sigma(x, n - 1);
                    let abs_x: Vec<f64> = x.iter().map(|v| v.abs()).collect();
                    worst = worst.max(rel(deleted_sum, sig, deleted_scale + brute_sigma(&abs_x, n - 1)));
                    worst = worst.max(rel(
                        euler,
                        n as f64 * s - sig,
                        euler_scale + n as f64 * s_scale + brute_sigma(&abs_x, n - 1),
                    ));
                }
                let scan = identity_scan(&cfg, n, op, 1).unwrap();
                lib_worst = lib_worst.max(scan.max.max_rel());
            }
        }
        verdict(
            worst < 1e-10 && lib_worst < 1e-10 && count == 9000,
            format!("{count} samples, oracle max rel {worst:.2e}, library max rel {lib_worst:.2e} (tol 1e-10)"),
        )
    })
}

fn derivative_oracle() -> Verdict {
    let mut rng = rng(2202);
    let mut grad_err: f64 = 0.0;
    let mut hess_err: f64 = 0.0;
    for k in 0..1000 {
        let n = 2 + k % 3;
        let alpha = [0.5, 1.0, 2.0][k % 3];
        let x = cone_point(&mut rng, n, alpha, -1.0 / alpha + 0.05, 5.0);
        let lam = CurvatureVector::new(x.clone()).unwrap();
        let p = SumHessianParams::new(n, alpha, 1.0).unwrap();
        let b = sumhess::symfun::eval_bundle(&lam, &p);
        let f = |y: &[f64]| sumhess::symfun::sum_hessian(&CurvatureVector::new(y.to_vec()).unwrap(), &p);
        let h = 1e-6;
        for i in 0..n {
            let (mut a, mut c) = (x.clone(), x.clone());
            a[i] += h;
            c[i] -= h;
            let fd = (f(&a) - f(&c)) / (2.0 * h);
            grad_err = grad_err.max((fd - b.gradient[i]).abs() / b.gradient[i].abs().max(1.0));
            for j in 0..n {
                let hh = 1e-3;
                let at = |di: f64, dj: f64| {
                    let mut y = x.clone();
                    y[i] += di;
                    y[j] += dj;
                    f(&y)
                };
                let fd2 = if i == j {
                    (at(hh, 0.0) - 2.0 * f(&x) + at(-hh, 0.0)) / (hh * hh)
                } else {
                    (at(hh, hh) - at(hh, -hh) - at(-hh, hh) + at(-hh, -hh)) / (4.0 * hh * hh)
                };
                hess_err = hess_err.max((fd2 - b.hessian[(i, j)]).abs() / b.hessian[(i, j)].abs().max(1.0));
            }
        }
    }
    let mut inv_err: f64 = 0.0;
    for k in 0..100 {
        let n = 2 + k % 3;
        let alpha = [0.5, 1.0, 2.0][k % 3];
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..3.0)).collect();
        let q = random_orthogonal(&mut rng, n);
        let a = &q * DMatrix::from_diagonal(&DVector::from_vec(x.clone())) * q.transpose();
        let a = (&a + a.transpose()) * 0.5;
        let p = SumHessianParams::new(n, alpha, 1.0).unwrap();
        let m = sumhess::symfun::matrix_sum_hessian(&a, &p).unwrap();
        let scale = brute_s_scale(&x, n, alpha).max(1.0);
        inv_err = inv_err.max((m.value - brute_s(&x, n, alpha)).abs() / scale);
        let g = SumHessian::new(alpha).eval_bundle(&x).gradient;
        let expected = &q * DMatrix::from_diagonal(&DVector::from_vec(g)) * q.transpose();
        inv_err = inv_err.max((m.gradient - expected).amax() / scale);
    }
    verdict(
        grad_err < 1e-6 && hess_err < 1e-6 && inv_err < 1e-10,
        format!(
            "1000 samples: gradient {grad_err:.2e}, hessian {hess_err:.2e} (tol 1e-6); 100 conjugations: {inv_err:.2e} (tol 1e-10)"
        ),
    )
}

/// Exact second derivative in `t` of `S_n(A + tX)`, a polynomial of degree
/// at most `n ≤ 4`, by the five-point rule on principal minors.
fn poly_second_derivative(a: &DMatrix<f64>, x: &DMatrix<f64>, alpha: f64) -> f64 {
    let h = 0.5;
    let f = |t: f64| minor_s(&(a + x * t), alpha);
    (-f(2.0 * h) + 16.0 * f(h) - 30.0 * f(0.0) + 16.0 * f(-h) - f(-2.0 * h)) / (12.0 * h * h)
}

fn liren() -> Verdict {
    timed(Duration::from_secs(60), || {
        let p = SumHessianParams::new(3, 1.0, 1.0).unwrap();
        let (samples, _) = cone_samples(&SampleConfig::new(5000, 2501), 3, p.operator(), 1).unwrap();
        let eligible: Vec<&Vec<f64>> = samples
            .iter()
            .filter(|l| l.windows(2).all(|w| w[0] - w[1] >= 0.1))
            .take(500)
            .collect();
        let mut rng = rng(2502);
        let mut fd_err: f64 = 0.0;
        let mut oracle_err: f64 = 0.0;
        for lam in &eligible {
            let mut x = DMatrix::zeros(3, 3);
            for i in 0..3 {
                for j in i..3 {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    x[(i, j)] = v;
                    x[(j, i)] = v;
                }
            }
            let c = liren_decomposition_check(&CurvatureVector::new((*lam).clone()).unwrap(), &x, &p).unwrap();
            let a = DMatrix::from_diagonal(&DVector::from_column_slice(lam));
            let exact = poly_second_derivative(&a, &x, 1.0);
            fd_err = fd_err.max(c.residual);
            oracle_err = oracle_err.max((c.decomposition - exact).abs());
        }
        verdict(
            eligible.len() == 500 && fd_err < 1e-5 && oracle_err < 1e-5,
            format!(
                "{} instances: finite difference vs decomposition {fd_err:.2e}, decomposition vs polynomial oracle {oracle_err:.2e} (tol 1e-5)",
                eligible.len()
            ),
        )
    })
}

fn theta() -> Verdict {
    let p = SumHessianParams::new(3, 1.0, 1.0).unwrap();
    let scan = theta_scan(&SampleConfig::new(100_000, 2201), &p, 1).unwrap();
    let w = &scan.worst;
    let lam = CurvatureVector::new(w.lam.clone()).unwrap();
    let k = w.i - 1;
    let oracle = brute_s(&without(&w.lam, &[k]), 2, 1.0) * w.lam[k] / brute_s(&w.lam, 3, 1.0);
    let lib = lemma22_ratio(&lam, &p, w.i).unwrap();
    verdict(
        scan.accepted == 100_000 && scan.theta > 0.0 && scan.nonpositive_count == 0 && (oracle - lib).abs() < 1e-12,
        format!(
            "{} samples: theta {:.4e} at i = {}, {} non-positive ratios for i <= n-1; oracle ratio at witness {:.4e}",
            scan.accepted, scan.theta, w.i, scan.nonpositive_count, oracle
        ),
    )
}

fn concavity() -> Verdict {
    timed(Duration::from_secs(300), || {
        let p = SumHessianParams::new(3, 1.0, 1.0).unwrap();
        let cfg = SampleConfig::new(100_000, 2301);
        let opts = ConcavityOptions::default();
        let small = concavity_search_k(0.1, &cfg, &p, &opts, 1).unwrap();
        let large = concavity_search_k(10.0, &cfg, &p, &opts, 1).unwrap();
        let finite = small.status == SearchStatus::NoCounterexampleFound && small.k.is_some_and(f64::is_finite);
        let clean = small.violations == 0
            && small.sampled == 100_000
            && small.adversarial.len() == 10
            && small.adversarial.iter().all(|r| !r.violated);
        let oracle_ok = small.adversarial.iter().all(|r| {
            let inst = ConcavityInstance {
                lam: CurvatureVector::new(r.best.lam.clone()).unwrap(),
                xi: r.best.xi.clone(),
                eps: 0.1,
                k: small.k.unwrap_or(f64::NAN),
            };
            let v = concavity_lhs(&inst, &p).unwrap();
            oracle_lhs(&r.best.lam, &r.best.xi, 0.1, inst.k) >= -1e-9 * v.abs().max(1.0)
        });
        let monotone = matches!((large.k, small.k), (Some(a), Some(b)) if a <= b);
        verdict(
            finite && clean && oracle_ok && monotone,
            format!(
                "K(0.1) = {:?} over {} samples + {} refined, {} violations; K(10) = {:?}",
                small.k,
                small.sampled,
                small.adversarial.len(),
                small.violations,
                large.k
            ),
        )
    })
}

fn oracle_lhs(lam: &[f64], xi: &[f64], eps: f64, k: f64) -> f64 {
    let n = lam.len();
    let g: Vec<f64> = (0..n).map(|j| brute_s(&without(lam, &[j]), n - 1, 1.0)).collect();
    let lin: f64 = (0..n).map(|j| g[j] * xi[j]).sum();
    let mut quad = 0.0;
    for pi in 0..n {
        for q in 0..n {
            if pi != q {
                quad += brute_s(&without(lam, &[pi, q]), n - 2, 1.0) * xi[pi] * xi[q];
            }
        }
    }
    let tail: f64 = (1..n).map(|j| g[j] * xi[j] * xi[j]).sum();
    lam[0] * (k * lin * lin - quad) - g[0] * xi[0] * xi[0] + (1.0 + eps) * tail
}

fn kappa_floor() -> Verdict {
    let mut details = Vec::new();
    let mut pass = true;
    let mut rng = rng(2401);
    for alpha in [0.5, 1.0, 2.0] {
        let p = SumHessianParams::new(3, alpha, 1.0).unwrap();
        let lo = -2.0 / alpha - 1.0;
        let cfg = SampleConfig::new(10_000, 2400).with_interval(lo, 5.0);
        let scan = kappa_floor_scan(&cfg, &p, 1).unwrap();
        let mut oracle_holds = 0;
        for _ in 0..10_000 {
            let x = cone_point(&mut rng, 3, alpha, lo, 5.0);
            if x.iter().all(|v| *v > -1.0 / alpha) {
                oracle_holds += 1;
            }
        }
        pass &= scan.admissible_samples == 10_000 && scan.holds == 10_000 && oracle_holds == 10_000;
        details.push(format!(
            "alpha {alpha}: {}/{} library, {oracle_holds}/10000 oracle, min gap {:.2e}",
            scan.holds, scan.admissible_samples, scan.min_gap
        ));
    }
    verdict(pass, details.join("; "))
}

fn surface(kind: SurfaceKind, radius: f64, h: f64) -> (sumhess::hypgeom::AnalyticSurface, GeometryField) {
    let spec = GridSpec {
        domain: Domain::Ball { radius },
        dim: 2,
        h,
    };
    let s = analytic_surface(&kind, &spec, 1e-3).unwrap();
    let f = GeometryField::from_grid(&s.grid).unwrap();
    (s, f)
}

const HS: [f64; 3] = [1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0];

fn geometry() -> Verdict {
    let mut exact_err: f64 = 0.0;
    for h in HS {
        let (s, f) = surface(SurfaceKind::Horosphere { height: 0.7 }, 0.5, h);
        for g in f.nodes.iter().flatten() {
            exact_err = exact_err.max(g.kappa.iter().map(|k| (k - 1.0).abs()).fold(0.0, f64::max));
        }
        assert!(s.grid.len() > 0);
        let (_, f) = surface(
            SurfaceKind::TiltedPlane {
                offset: 2.0,
                slope: vec![0.6, -0.3],
            },
            0.5,
            h,
        );
        for g in f.nodes.iter().flatten() {
            exact_err = exact_err.max(g.kappa.iter().map(|k| (k - g.nu).abs()).fold(0.0, f64::max));
        }
    }
    let hemi: Vec<f64> = HS
        .iter()
        .map(|&h| {
            let (s, f) = surface(SurfaceKind::Hemisphere { radius: 1.0 }, 0.5, h);
            kappa_error(&s, &f)
        })
        .collect();
    let cap: Vec<f64> = HS
        .iter()
        .map(|&h| {
            let (s, f) = surface(SurfaceKind::Cap { depth: 0.5, radius: 1.0 }, 0.5, h);
            let oracle = f
                .interior(&s.grid)
                .map(|(_, g)| g.kappa.iter().map(|k| (k - 0.5).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            assert!((oracle - kappa_error(&s, &f)).abs() < 1e-15);
            oracle
        })
        .collect();
    let ratios = |e: &[f64]| [e[0] / e[1], e[1] / e[2]];
    let (rh, rc) = (ratios(&hemi), ratios(&cap));
    verdict(
        exact_err < 1e-10 && rh.iter().chain(&rc).all(|r| *r >= 3.5),
        format!(
            "exact surfaces {exact_err:.2e} (tol 1e-10); hemisphere ratios {:.2} {:.2}, cap ratios {:.2} {:.2} (min 3.5)",
            rh[0], rh[1], rc[0], rc[1]
        ),
    )
}

fn l1_identities() -> Verdict {
    let caps = [(0.5, 1.0, 0.5), (0.3, 1.0, 0.6), (1.0, 2.0, 0.9)];
    let mut pass = true;
    let mut details = Vec::new();
    for (depth, radius, dom) in caps {
        let mut angle = Vec::new();
        let mut lap = Vec::new();
        for h in HS {
            let (s, f) = surface(SurfaceKind::Cap { depth, radius }, dom, h);
            angle.push(angle_gradient_check(&s.grid, &f).max_residual);
            lap.push(weighted_laplacian_check(&s.grid, &f, SumHessian::new(1.0), 1e-2).unwrap().max_residual);
        }
        let order = |e: &[f64]| (e[1] / e[2]).log2();
        let (oa, ol) = (order(&angle), order(&lap));
        let ok = (oa - 2.0).abs() <= 0.25 && (ol - 2.0).abs() <= 0.25 && angle[2] < 1e-3 && lap[2] < 1e-3;
        pass &= ok;
        details.push(format!(
            "cap a={depth} r={radius}: orders {oa:.2}/{ol:.2}, h=1/128 residuals {:.1e}/{:.1e}",
            angle[2], lap[2]
        ));
    }
    verdict(pass, details.join("; "))
}

fn solver() -> Verdict {
    timed(Duration::from_secs(120), || {
        let params = SumHessianParams::new(2, 1.0, 1.0).unwrap();
        let eps = 0.5;
        let prob = PlateauProblem::new(Domain::Ball { radius: 1.0 }, 1.0 / 64.0, eps, params, 1.0).unwrap();
        let c = umbilic_c(2, 1.0, 1.0);
        let (a, r) = cap_through(c, 1.0, eps);
        let cap = |x: &[f64]| (r * r - x.iter().map(|v| v * v).sum::<f64>()).sqrt() - a;
        let cfg = SolverConfig::default();
        let res = continuation(&prob, &cfg, &[]).unwrap();
        let rep = &res.stages[0].report;
        let sol = res.solution.as_ref();
        let disc = Discretization::new(&prob).unwrap();
        let err = |g: &sumhess::hypgeom::GraphGrid| {
            disc.unknowns()
                .iter()
                .map(|&i| (g.height(i) - cap(&g.coords(i))).abs())
                .fold(0.0, f64::max)
        };
        let err_default = sol.map_or(f64::INFINITY, err);
        let x0: Vec<f64> = disc.sample(|x| cap(x) * (1.0 + 0.02 * (1.0 - x.iter().map(|v| v * v).sum::<f64>())));
        let (g, perturbed) = newton_solve(&disc.grid(&x0).unwrap(), &prob, &cfg).unwrap();
        let err_perturbed = err(&g);
        let check = residual(&g, &prob).unwrap().max_norm;
        let ok = |r: &sumhess::solver::SolveReport, e: f64| r.converged && r.final_residual < 1e-8 && r.iterations <= 15 && e < 1e-3;
        verdict(
            ok(rep, err_default) && ok(&perturbed, err_perturbed) && check < 1e-8,
            format!(
                "cap start: {} its, residual {:.1e}, max|u - u_cap| {:.2e}; perturbed start: {} its, residual {:.1e}, max|u - u_cap| {:.2e}",
                rep.iterations, rep.final_residual, err_default, perturbed.iterations, perturbed.final_residual, err_perturbed
            ),
        )
    })
}

fn estimate_probe() -> Verdict {
    let params = SumHessianParams::new(2, 1.0, 1.0).unwrap();
    let prob = PlateauProblem::new(Domain::Ball { radius: 1.0 }, 1.0 / 32.0, 0.5, params, 1.0).unwrap();
    let cfg = SolverConfig {
        continuation: vec![Schedule {
            parameter: ContinuationParameter::Epsilon,
            values: vec![0.5, 0.25, 0.125],
        }],
        ..Default::default()
    };
    let res = continuation(&prob, &cfg, &[2.0, 10.0, 50.0]).unwrap();
    let est: Vec<_> = res.stages.iter().map(|s| s.report.estimate.clone().unwrap()).collect();
    let k0 = est[0].kappa_stats.interior_max_abs;
    let bounded = est.iter().all(|e| e.kappa_stats.interior_max_abs <= 10.0 * k0);
    let admissible = res
        .stages
        .iter()
        .all(|s| s.report.converged && s.report.min_cone_slack_history.iter().all(|v| *v > 0.0));
    let sigma_n = est.iter().all(|e| e.kappa_stats.min_sigma_n.is_finite());
    let q = est.iter().all(|e| {
        e.q_field.len() == 3
            && e.q_field.iter().zip([2.0, 10.0, 50.0]).all(|(q, n)| q.n == n && q.max_value.is_some_and(f64::is_finite))
    });
    verdict(
        res.stages.len() == 3 && !res.truncated && bounded && admissible && sigma_n && q,
        format!(
            "eps {:?}: interior max|kappa| {:?}, min sigma_n {:?}, Q maxima {:?}",
            res.stages.iter().map(|s| s.epsilon).collect::<Vec<_>>(),
            est.iter().map(|e| format!("{:.4}", e.kappa_stats.interior_max_abs)).collect::<Vec<_>>(),
            est.iter().map(|e| format!("{:.4}", e.kappa_stats.min_sigma_n)).collect::<Vec<_>>(),
            est.iter()
                .map(|e| e.q_field.iter().map(|q| format!("{:.3}", q.max_value.unwrap_or(f64::NAN))).collect::<Vec<_>>())
                .collect::<Vec<_>>()
        ),
    )
}

const DETERMINISM_CONFIG: &str = r#"
[domain]
h = 0.0625
[domain.shape]
kind = "ball"
radius = 1.0

[operator]
n = 2
alpha = 1.0
sigma = 1.0
lower_bound_a = 1.0

[boundary]
epsilon = 0.5

[[solver.continuation]]
parameter = "epsilon"
values = [0.5, 0.25]

[report]
input = "solve/solution.bin"

[lemmas]
identity_samples = 200
liren_samples = 200
theta_samples = 2000
floor_samples = 1000

[concavity]
samples = 2000

[surface]
dim = 2
h_list = [0.0625, 0.03125]
[surface.domain]
kind = "ball"
radius = 0.5
[surface.surface]
kind = "cap"
depth = 0.5
radius = 1.0
"#;

fn strip_timing(text: &str) -> String {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v.to_string()
}

fn run_all(root: &Path, config: &Path) -> Vec<(String, String, Vec<(String, Vec<u8>)>)> {
    let commands = ["solve", "continue", "verify-lemmas", "search-concavity", "curvature-report", "surface-check"];
    commands
        .iter()
        .map(|c| {
            let out = root.join(c);
            let status = Command::new(env!("CARGO_BIN_EXE_sumhess"))
                .args([c, "--config"])
                .arg(config)
                .arg("--out")
                .arg(&out)
                .args(["--seed", "17", "--workers", "2", "--quiet"])
                .status()
                .unwrap();
            assert_eq!(status.code(), Some(0), "{c}");
            let report = std::fs::read_to_string(out.join(format!("{c}.json"))).unwrap();
            let v: serde_json::Value = serde_json::from_str(&report).unwrap();
            let artifacts = v["artifacts"]
                .as_array()
                .unwrap()
                .iter()
                .map(|a| {
                    let name = a.as_str().unwrap().to_string();
                    let bytes = std::fs::read(out.join(&name)).unwrap();
                    (name, bytes)
                })
                .collect();
            (c.to_string(), strip_timing(&report), artifacts)
        })
        .collect()
}

fn determinism() -> Verdict {
    let mut runs = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let config = dir.path().join("run.toml");
        std::fs::write(&config, DETERMINISM_CONFIG).unwrap();
        runs.push(run_all(dir.path(), &config));
    }
    let mut same = true;
    let mut names = Vec::new();
    for (a, b) in runs[0].iter().zip(&runs[1]) {
        same &= a == b;
        names.push(format!("{} ({} artifacts)", a.0, a.2.len()));
    }
    verdict(same, format!("byte-identical reports and artifacts: {}", names.join(", ")))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 11] = [
        ("sum Hessian derivative and deleted-entry identities", lemma21_suite),
        ("gradient and Hessian finite-difference oracle, orthogonal invariance", derivative_oracle),
        ("spectral second-derivative decomposition", liren),
        ("positive empirical theta", theta),
        ("concavity constant search", concavity),
        ("curvature floor on the admissible cone", kappa_floor),
        ("geometry exactness and convergence", geometry),
        ("angle-function identities on caps", l1_identities),
        ("Newton solver against the umbilic cap", solver),
        ("epsilon-continuation estimate probe", estimate_probe),
        ("deterministic reports", determinism),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let v = f();
        println!("{} {name}: {}", if v.pass { "PASS" } else { "FAIL" }, v.detail);
        if !v.pass {
            failed += 1;
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
