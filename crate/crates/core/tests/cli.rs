use std::path::Path;
use std::process::Command;

use serde_json::Value;
use sumhess::hypgeom::io::{decode_binary, heatmap_pixel};

const BASE: &str = r#"
[domain]
h = 0.0625
[domain.shape]
kind = "ball"
radius = 1.0

[operator]
n = 2
alpha = 1.0
sigma = 1.0

[boundary]
epsilon = 0.5
"#;

fn run(dir: &Path, command: &str, config: &str, extra: &[&str]) -> (i32, Option<Value>) {
    let cfg = dir.join("config.toml");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    let status = Command::new(env!("CARGO_BIN_EXE_sumhess"))
        .arg(command)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .arg("--quiet")
        .args(extra)
        .status()
        .unwrap();
    let report = std::fs::read(out.join(format!("{command}.json")))
        .ok()
        .map(|b| serde_json::from_slice(&b).unwrap());
    (status.code().unwrap(), report)
}

#[test]
fn solve_writes_artifacts_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let (code, report) = run(dir.path(), "solve", BASE, &[]);
    assert_eq!(code, 0);
    let report = report.unwrap();
    assert_eq!(report["schema"], 1);
    assert_eq!(report["command"], "solve");
    assert_eq!(report["exit_code"], 0);
    assert_eq!(report["config_hash"].as_str().unwrap().len(), 16);
    let out = dir.path().join("out");
    for name in ["solution.bin", "solution.csv", "curvature.csv", "kappa1.pgm", "q_n2.pgm", "q_n10.pgm", "q_n50.pgm"] {
        assert!(out.join(name).is_file(), "{name}");
    }
    let grid = decode_binary(&std::fs::read(out.join("solution.bin")).unwrap()).unwrap();
    let pgm = std::fs::read(out.join("q_n10.pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n"));
    let (w, h) = (grid.shape()[0], grid.shape()[1]);
    assert!(pgm.len() > w * h);
    let pixels = &pgm[pgm.len() - w * h..];
    let q = &report["result"]["report"]["estimate"]["q_field"];
    let entry = q.as_array().unwrap().iter().find(|e| e["n"] == 10.0).unwrap();
    let node = entry["node"].as_u64().unwrap() as usize;
    let (r, c) = heatmap_pixel(&grid, node).unwrap();
    assert_eq!(pixels[r * w + c], 255);
    assert_eq!(*pixels.iter().max().unwrap(), 255);
}

#[test]
fn validation_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let no_sigma = BASE.replace("sigma = 1.0\n", "");
    assert_eq!(run(dir.path(), "solve", &no_sigma, &[]).0, 2);
    assert_eq!(run(dir.path(), "solve", &BASE.replace("sigma = 1.0", "sigma = 5.0"), &[]).0, 2);
    assert_eq!(run(dir.path(), "continue", BASE, &[]).0, 2);
    assert_eq!(run(dir.path(), "curvature-report", BASE, &[]).0, 2);
    assert_eq!(run(dir.path(), "solve", &format!("{BASE}\n[unknown]\nx = 1\n"), &[]).0, 2);
    assert!(!dir.path().join("out").join("solution.bin").exists());
}

#[test]
fn non_convergence_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!("{BASE}\n[solver]\nmax_iters = 1\nnewton_tol = 1e-14\n");
    let (code, report) = run(dir.path(), "solve", &cfg, &[]);
    assert_eq!(code, 3);
    assert_eq!(report.unwrap()["exit_code"], 3);
}

#[test]
fn lemma_anomaly_exits_four() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[lemmas]\nidentity_samples = 50\nidentity_tol = 1e-300\nliren_samples = 20\ntheta_samples = 200\nfloor_samples = 200\n";
    let (code, report) = run(dir.path(), "verify-lemmas", cfg, &[]);
    assert_eq!(code, 4);
    assert_eq!(report.unwrap()["exit_code"], 4);
}

#[test]
fn default_lemmas_pass_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = "[lemmas]\nidentity_samples = 100\nliren_samples = 100\ntheta_samples = 2000\nfloor_samples = 1000\n";
    let (a, ra) = run(dir.path(), "verify-lemmas", cfg, &["--seed", "5"]);
    let (b, rb) = run(dir.path(), "verify-lemmas", cfg, &["--seed", "5", "--workers", "4"]);
    assert_eq!((a, b), (0, 0));
    assert_eq!(ra.unwrap()["result"], rb.unwrap()["result"]);
}

#[test]
fn unwritable_output_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.toml");
    std::fs::write(&cfg, BASE).unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let status = Command::new(env!("CARGO_BIN_EXE_sumhess"))
        .args(["solve", "--quiet", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&blocker)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
    let missing = Command::new(env!("CARGO_BIN_EXE_sumhess"))
        .args(["solve", "--quiet", "--config"])
        .arg(dir.path().join("absent.toml"))
        .arg("--out")
        .arg(dir.path().join("o"))
        .status()
        .unwrap();
    assert_eq!(missing.code(), Some(1));
}
