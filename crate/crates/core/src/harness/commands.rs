use serde::Serialize;
use serde_json::{json, Value};

use super::config::{LoadedConfig, ReportSection};
use super::output::{summarize, OutputDir};
use crate::error::{Error, Result};
use crate::hypgeom::io::{decode_binary, encode_binary, write_curvature_csv, write_grid_csv};
use crate::hypgeom::{
    algebraic_residuals, analytic_surface, angle_gradient_check, kappa_error, weighted_laplacian_check,
    GeometryField, GraphGrid, GridSpec,
};
use crate::inequality_lab::{
    concavity_search_k, identity_scan, kappa_floor_scan, liren_scan, theta_scan, SampleConfig, SearchStatus,
};
use crate::solver::{
    continuation, estimate_report, interior_geometry, kappa1_field, q_field, residual, PlateauProblem,
};
use crate::symfun::{SumHessian, SumHessianParams};

pub(crate) struct Outcome {
    pub exit_code: i32,
    pub result: Value,
    pub message: String,
}

pub(crate) struct Context<'a> {
    pub config: &'a LoadedConfig,
    pub seed: u64,
    pub workers: usize,
}

fn to_value(v: &impl Serialize) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Format(e.to_string()))
}

fn csv_bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut buf = Vec::new();
    f(&mut buf).expect("writing to memory cannot fail");
    buf
}

fn q_name(n: f64) -> String {
    format!("q_n{n}.pgm")
}

/// Grid, curvature and heatmap files for a solution.
fn solution_artifacts(out: &mut OutputDir, grid: &GraphGrid, report: &ReportSection) -> Result<()> {
    if report.grid_binary {
        out.write("solution.bin", &encode_binary(grid))?;
    }
    if report.grid_csv {
        out.write("solution.csv", &csv_bytes(|b| write_grid_csv(grid, b)))?;
    }
    let geometry = interior_geometry(grid)?;
    if report.curvature_csv {
        let field = GeometryField { nodes: geometry.clone() };
        out.write("curvature.csv", &csv_bytes(|b| write_curvature_csv(grid, &field, b)))?;
    }
    if report.heatmaps {
        out.heatmap("kappa1.pgm", &kappa1_field(&geometry), grid)?;
        for &n in &report.n_list {
            out.heatmap(&q_name(n), &q_field(&geometry, n), grid)?;
        }
    }
    Ok(())
}

fn problem_json(prob: &PlateauProblem) -> Result<Value> {
    Ok(json!({
        "domain": to_value(&prob.domain)?,
        "h": prob.h,
        "epsilon": prob.epsilon,
        "n": prob.params.n,
        "alpha": prob.params.alpha,
        "sigma": prob.params.sigma,
        "lower_bound_a": prob.lower_bound_a,
    }))
}

pub(crate) fn validate_solve(ctx: &Context) -> Result<()> {
    ctx.config.problem()?;
    ctx.config.solver()?;
    ctx.config.report()?;
    Ok(())
}

pub(crate) fn solve(ctx: &Context, out: &mut OutputDir) -> Result<Outcome> {
    let prob = ctx.config.problem()?;
    let mut cfg = ctx.config.solver()?.clone();
    cfg.continuation.clear();
    let report = ctx.config.report()?;
    let res = continuation(&prob, &cfg, &report.n_list)?;
    let stage = &res.stages[0];
    if let Some(grid) = &res.solution {
        solution_artifacts(out, grid, report)?;
    }
    let converged = stage.report.converged;
    Ok(Outcome {
        exit_code: if converged { 0 } else { 3 },
        message: format!(
            "solve: {:?} after {} iterations, residual {:.3e}",
            stage.report.status, stage.report.iterations, stage.report.final_residual
        ),
        result: json!({
            "problem": problem_json(&prob)?,
            "report": to_value(&stage.report)?,
        }),
    })
}

pub(crate) fn validate_continue(ctx: &Context) -> Result<()> {
    validate_solve(ctx)?;
    if ctx.config.config.solver.continuation.is_empty() {
        return Err(Error::Validation("continue needs at least one [[solver.continuation]] schedule".into()));
    }
    Ok(())
}

pub(crate) fn continue_run(ctx: &Context, out: &mut OutputDir, config_hash: &str) -> Result<Outcome> {
    let prob = ctx.config.problem()?;
    let cfg = ctx.config.solver()?;
    let report = ctx.config.report()?;
    let res = continuation(&prob, cfg, &report.n_list)?;
    if let Some(grid) = &res.solution {
        solution_artifacts(out, grid, report)?;
    }
    let summary = summarize(&res.stages, config_hash)?;
    let ok = !res.truncated && summary.all_converged;
    Ok(Outcome {
        exit_code: if ok { 0 } else { 3 },
        message: format!(
            "continue: {} stages, all converged: {}, bounded: {}",
            summary.stages, summary.all_converged, summary.bounded_r
        ),
        result: json!({
            "problem": problem_json(&prob)?,
            "truncated": res.truncated,
            "summary": to_value(&summary)?,
            "stages": to_value(&res.stages)?,
        }),
    })
}

pub(crate) fn validate_lemmas(ctx: &Context) -> Result<()> {
    ctx.config.config.lemmas.validate()
}

fn params(n: usize, alpha: f64) -> Result<SumHessianParams> {
    SumHessianParams::new(n, alpha, 1.0)
}

pub(crate) fn verify_lemmas(ctx: &Context) -> Result<Outcome> {
    let l = &ctx.config.config.lemmas;
    let mut anomalies = Vec::new();
    let mut identities = Vec::new();
    for &n in &l.identity_dims {
        for &alpha in &l.identity_alphas {
            let scan = identity_scan(&SampleConfig::new(l.identity_samples, ctx.seed), n, SumHessian::new(alpha), ctx.workers)?;
            let max_rel = scan.max.max_rel();
            let pass = max_rel < l.identity_tol;
            if !pass {
                anomalies.push(format!("identities n={n} alpha={alpha}: {max_rel:.3e}"));
            }
            identities.push(json!({ "scan": to_value(&scan)?, "max_rel": max_rel, "pass": pass }));
        }
    }
    let liren = liren_scan(
        &SampleConfig::new(l.liren_samples, ctx.seed),
        &params(l.liren_n, l.liren_alpha)?,
        l.liren_gap,
        ctx.workers,
    )?;
    let liren_pass = liren.max_residual < l.liren_tol;
    if !liren_pass {
        anomalies.push(format!("decomposition: {:.3e}", liren.max_residual));
    }
    let mut theta = Vec::new();
    for &alpha in &l.theta_alphas {
        let scan = theta_scan(&SampleConfig::new(l.theta_samples, ctx.seed), &params(l.theta_n, alpha)?, ctx.workers)?;
        let pass = scan.nonpositive_count == 0 && scan.theta > 0.0;
        if !pass {
            anomalies.push(format!("theta alpha={alpha}: {} non-positive ratios", scan.nonpositive_count));
        }
        theta.push(json!({ "scan": to_value(&scan)?, "pass": pass }));
    }
    let mut floor = Vec::new();
    for &alpha in &l.floor_alphas {
        let [lo, hi] = l.floor_interval.unwrap_or([-2.0 / alpha - 1.0, 5.0]);
        let cfg = SampleConfig::new(l.floor_samples, ctx.seed).with_interval(lo, hi);
        let scan = kappa_floor_scan(&cfg, &params(l.floor_n, alpha)?, ctx.workers)?;
        let pass = scan.holds == scan.admissible_samples;
        if !pass {
            anomalies.push(format!("floor alpha={alpha}: {:?}", scan.counterexample));
        }
        floor.push(json!({ "scan": to_value(&scan)?, "pass": pass }));
    }
    Ok(Outcome {
        exit_code: if anomalies.is_empty() { 0 } else { 4 },
        message: if anomalies.is_empty() {
            "verify-lemmas: all checks within tolerance".into()
        } else {
            format!("verify-lemmas: anomalies: {}", anomalies.join("; "))
        },
        result: json!({
            "tolerances": { "identity": l.identity_tol, "decomposition": l.liren_tol },
            "identities": identities,
            "decomposition": { "scan": to_value(&liren)?, "pass": liren_pass },
            "theta": theta,
            "kappa_floor": floor,
            "anomalies": anomalies,
        }),
    })
}

pub(crate) fn validate_concavity(ctx: &Context) -> Result<()> {
    ctx.config.config.concavity.validate()
}

pub(crate) fn search_concavity(ctx: &Context) -> Result<Outcome> {
    let c = &ctx.config.config.concavity;
    let p = params(c.n, c.alpha)?;
    let cfg = SampleConfig::new(c.samples, ctx.seed);
    let mut searches = Vec::new();
    for &eps in &c.eps_list {
        searches.push(concavity_search_k(eps, &cfg, &p, &c.search, ctx.workers)?);
    }
    let failed = searches.iter().any(|s| s.status == SearchStatus::SearchFailure);
    let mut by_eps: Vec<(f64, Option<f64>)> = searches.iter().map(|s| (s.eps, s.k)).collect();
    by_eps.sort_by(|a, b| a.0.total_cmp(&b.0));
    let k_nonincreasing_in_eps = !failed && by_eps.windows(2).all(|w| w[1].1 <= w[0].1);
    Ok(Outcome {
        exit_code: if failed { 3 } else { 0 },
        message: format!(
            "search-concavity: {}",
            searches
                .iter()
                .map(|s| format!("eps={} K={:?} ({})", s.eps, s.k, s.label))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        result: json!({
            "searches": to_value(&searches)?,
            "k_nonincreasing_in_eps": k_nonincreasing_in_eps,
        }),
    })
}

pub(crate) fn validate_curvature(ctx: &Context) -> Result<()> {
    validate_solve(ctx)?;
    if ctx.config.config.report.input.is_none() {
        return Err(Error::Validation("curvature-report needs report.input".into()));
    }
    Ok(())
}

pub(crate) fn curvature_report(ctx: &Context, out: &mut OutputDir) -> Result<Outcome> {
    let prob = ctx.config.problem()?;
    let report = ctx.config.report()?;
    let input = ctx.config.base_dir.join(report.input.as_ref().expect("validated"));
    let bytes = std::fs::read(&input).map_err(|e| Error::io(&input, e))?;
    let grid = decode_binary(&bytes)?;
    if grid.dim() != prob.dim() {
        return Err(Error::Validation(format!(
            "grid dimension {} does not match operator n = {}",
            grid.dim(),
            prob.dim()
        )));
    }
    let estimate = estimate_report(&grid, &prob, &report.n_list)?;
    let res = residual(&grid, &prob)?;
    let geometry = interior_geometry(&grid)?;
    if report.curvature_csv {
        let field = GeometryField { nodes: geometry.clone() };
        out.write("curvature.csv", &csv_bytes(|b| write_curvature_csv(&grid, &field, b)))?;
    }
    if report.heatmaps {
        out.heatmap("kappa1.pgm", &kappa1_field(&geometry), &grid)?;
        for &n in &report.n_list {
            out.heatmap(&q_name(n), &q_field(&geometry, n), &grid)?;
        }
    }
    Ok(Outcome {
        exit_code: 0,
        message: format!(
            "curvature-report: interior max |kappa| {:.4e}, residual {:.3e}",
            estimate.kappa_stats.interior_max_abs, res.max_norm
        ),
        result: json!({
            "problem": problem_json(&prob)?,
            "residual_max": res.max_norm,
            "inadmissible_nodes": res.inadmissible.len(),
            "estimate": to_value(&estimate)?,
        }),
    })
}

pub(crate) fn validate_surface(ctx: &Context) -> Result<()> {
    ctx.config
        .config
        .surface
        .as_ref()
        .ok_or_else(|| Error::Validation("surface-check needs a [surface] section".into()))?
        .validate()
}

fn orders(hs: &[f64], errs: &[f64]) -> Vec<f64> {
    hs.windows(2)
        .zip(errs.windows(2))
        .map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect()
}

pub(crate) fn surface_check(ctx: &Context, out: &mut OutputDir) -> Result<Outcome> {
    let s = ctx.config.config.surface.as_ref().expect("validated");
    let mut hs = s.h_list.clone();
    hs.sort_by(|a, b| b.total_cmp(a));
    let op = SumHessian::new(s.alpha);
    let mut rows = Vec::new();
    let (mut k_err, mut angle, mut lap) = (Vec::new(), Vec::new(), Vec::new());
    let mut finest = None;
    for &h in &hs {
        let spec = GridSpec {
            domain: s.domain.clone(),
            dim: s.dim,
            h,
        };
        let surf = analytic_surface(&s.surface, &spec, s.eps_floor)?;
        let field = GeometryField::from_grid(&surf.grid)?;
        let ke = kappa_error(&surf, &field);
        let alg = algebraic_residuals(&surf.grid, &field);
        let ag = angle_gradient_check(&surf.grid, &field);
        let wl = weighted_laplacian_check(&surf.grid, &field, op, s.umbilic_tol)?;
        k_err.push(ke);
        angle.push(ag.max_residual);
        lap.push(wl.max_residual);
        rows.push(json!({
            "h": h,
            "kappa_error": ke,
            "algebraic": to_value(&alg)?,
            "angle_gradient": to_value(&ag)?,
            "weighted_laplacian": to_value(&wl)?,
        }));
        finest = Some((surf, field));
    }
    let (surf, field) = finest.expect("h_list is non-empty");
    out.write(
        "surface_curvature.csv",
        &csv_bytes(|b| write_curvature_csv(&surf.grid, &field, b)),
    )?;
    Ok(Outcome {
        exit_code: 0,
        message: format!(
            "surface-check: kappa errors {}",
            k_err.iter().map(|e| format!("{e:.3e}")).collect::<Vec<_>>().join(", ")
        ),
        result: json!({
            "surface": to_value(&s.surface)?,
            "exact_kappa": s.surface.kappa(),
            "levels": rows,
            "orders": {
                "kappa_error": orders(&hs, &k_err),
                "angle_gradient": orders(&hs, &angle),
                "weighted_laplacian": orders(&hs, &lap),
            },
        }),
    })
}
