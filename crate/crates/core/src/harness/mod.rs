//! Configuration, command dispatch and report emission for the `sumhess`
//! binary.
//!
//! Every command writes `<command>.json` into the output directory next to
//! the artifacts it lists. Reports carry `schema: 1`, the FNV-1a hash of the
//! canonical configuration text and, as the last field, a `timing` object
//! that is the only part allowed to differ between identical runs.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, ValueEnum};
use serde_json::json;

pub use config::{
    fnv1a64, BoundarySection, ConcavitySection, Config, DomainSection, LemmaSection, LoadedConfig, OperatorSection,
    ReportSection, SurfaceSection,
};
pub use output::{emit_heatmap, summarize, write_atomic, OutputDir, Summary, BOUNDED_FACTOR};

use crate::error::{Error, Result};
use commands::Context;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_ANOMALY: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Solve,
    Continue,
    VerifyLemmas,
    SearchConcavity,
    CurvatureReport,
    SurfaceCheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Solve => "solve",
            Command::Continue => "continue",
            Command::VerifyLemmas => "verify-lemmas",
            Command::SearchConcavity => "search-concavity",
            Command::CurvatureReport => "curvature-report",
            Command::SurfaceCheck => "surface-check",
        }
    }
}

/// One invocation of the binary.
#[derive(Debug, Clone, Parser)]
#[command(name = "sumhess", version, about = "Sum Hessian curvature experiments")]
pub struct RunManifest {
    #[arg(value_enum)]
    pub command: Command,
    /// TOML configuration; all sections default when omitted.
    #[arg(long = "config")]
    pub config_path: Option<PathBuf>,
    #[arg(long = "out", default_value = "out")]
    pub output_dir: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: u64,
    #[arg(long)]
    pub quiet: bool,
}

/// Completed run: exit code and the path of the JSON report, if written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub report: Option<PathBuf>,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_VALIDATION,
    }
}

/// Runs a command and returns its exit code; diagnostics go to stderr.
pub fn run(manifest: &RunManifest) -> i32 {
    match execute(manifest) {
        Ok(o) => o.exit_code,
        Err(e) => {
            eprintln!("sumhess {}: {e}", manifest.command.name());
            exit_code_for(&e)
        }
    }
}

pub fn execute(manifest: &RunManifest) -> Result<RunOutcome> {
    let start = Instant::now();
    let loaded = LoadedConfig::load(manifest.config_path.as_deref())?;
    let ctx = Context {
        config: &loaded,
        seed: manifest.seed,
        workers: manifest.workers as usize,
    };
    match manifest.command {
        Command::Solve => commands::validate_solve(&ctx)?,
        Command::Continue => commands::validate_continue(&ctx)?,
        Command::VerifyLemmas => commands::validate_lemmas(&ctx)?,
        Command::SearchConcavity => commands::validate_concavity(&ctx)?,
        Command::CurvatureReport => commands::validate_curvature(&ctx)?,
        Command::SurfaceCheck => commands::validate_surface(&ctx)?,
    }
    let config_hash = format!("{:016x}", fnv1a64(loaded.canonical.as_bytes()));
    let mut out = OutputDir::create(&manifest.output_dir)?;
    let outcome = match manifest.command {
        Command::Solve => commands::solve(&ctx, &mut out)?,
        Command::Continue => commands::continue_run(&ctx, &mut out, &config_hash)?,
        Command::VerifyLemmas => commands::verify_lemmas(&ctx)?,
        Command::SearchConcavity => commands::search_concavity(&ctx)?,
        Command::CurvatureReport => commands::curvature_report(&ctx, &mut out)?,
        Command::SurfaceCheck => commands::surface_check(&ctx, &mut out)?,
    };
    let name = format!("{}.json", manifest.command.name());
    let report = json!({
        "schema": 1,
        "command": manifest.command.name(),
        "config_hash": config_hash,
        "seed": manifest.seed,
        "exit_code": outcome.exit_code,
        "artifacts": out.artifacts(),
        "result": outcome.result,
        "timing": {
            "elapsed_seconds": start.elapsed().as_secs_f64(),
            "workers": manifest.workers,
        },
    });
    let mut text = serde_json::to_string_pretty(&report).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    let path = out.path(&name);
    write_atomic(&path, text.as_bytes())?;
    if !manifest.quiet {
        println!("{}", outcome.message);
        println!("report: {}", path.display());
    }
    if outcome.exit_code != EXIT_OK {
        eprintln!("sumhess {}: {}", manifest.command.name(), outcome.message);
    }
    Ok(RunOutcome {
        exit_code: outcome.exit_code,
        report: Some(path),
    })
}
