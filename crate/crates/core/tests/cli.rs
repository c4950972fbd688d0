use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ldp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ldp"))
        .args(args)
        .env_remove("LDP_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn small_config(dir: &Path, n_grid: &str) -> String {
    let path = dir.join("cfg.json");
    let text = format!(
        r#"[{{
  "name": "tiny-mean",
  "estimator": "mean_vector",
  "mechanism": "optimal",
  "eps": 1.0,
  "n_grid": {n_grid},
  "d": 3,
  "replicates": 2,
  "generator": {{"kind": "bounded_uniform", "lo": -1.0, "hi": 1.0, "dim": 3}},
  "seed": 5
}}]"#
    );
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn estimate_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "[100, 400]");
    let out = ldp(&["estimate", "--config", &cfg]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "experiment,mechanism,n,eps,replicate,metric_name,value,wall_ms");
    assert_eq!(lines.len(), 1 + 2 * 2);
    assert!(lines[1].starts_with("tiny-mean,optimal,100,"));
    assert!(!text.contains('\r'));
}

#[test]
fn equal_seeds_give_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "[200]");
    let a = ldp(&["estimate", "--config", &cfg, "--seed", "11"]);
    let b = ldp(&["estimate", "--config", &cfg, "--seed", "11"]);
    let c = ldp(&["estimate", "--config", &cfg, "--seed", "12"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);

    let env = Command::new(env!("CARGO_BIN_EXE_ldp"))
        .args(["estimate", "--config", &cfg])
        .env("LDP_SEED", "11")
        .output()
        .unwrap();
    assert_eq!(env.stdout, a.stdout);
}

#[test]
fn summary_file_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "[100]");
    let summary = dir.path().join("summary.csv");
    let out = dir.path().join("runs.csv");
    let res = ldp(&[
        "estimate",
        "--config",
        &cfg,
        "--out",
        out.to_str().unwrap(),
        "--summary",
        summary.to_str().unwrap(),
    ]);
    assert_eq!(code(&res), 0);
    assert_eq!(fs::read_to_string(&out).unwrap().lines().count(), 3);
    let s = fs::read_to_string(&summary).unwrap();
    assert_eq!(s.lines().count(), 2, "{s}");
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "[]");
    let out = ldp(&["estimate", "--config", &cfg]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());

    let bad_pair = dir.path().join("pair.json");
    fs::write(
        &bad_pair,
        r#"{"name": "x", "estimator": "mean_scalar", "mechanism": "laplace_baseline", "eps": 1.0,
            "n_grid": [10], "d": 1, "replicates": 1, "seed": 0,
            "generator": {"kind": "bounded_uniform", "lo": -1.0, "hi": 1.0}}"#,
    )
    .unwrap();
    let out = ldp(&["estimate", "--config", bad_pair.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("mean_scalar"));

    let junk = dir.path().join("junk.json");
    fs::write(&junk, "{ not json").unwrap();
    assert_eq!(code(&ldp(&["estimate", "--config", junk.to_str().unwrap()])), 2);

    assert_eq!(code(&ldp(&["bench", "--preset", "nope"])), 2);
    assert_eq!(code(&ldp(&["mech-sample", "--mechanism", "sign-rr", "--x", "1", "--eps", "-1"])), 2);
    assert_eq!(code(&ldp(&["mech-sample", "--mechanism", "linf-ball", "--x", "3,0", "--eps", "1"])), 2);
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "[100]");
    let missing_dir = dir.path().join("no/such/dir/out.csv");
    let out = ldp(&["estimate", "--config", &cfg, "--out", missing_dir.to_str().unwrap()]);
    assert_eq!(code(&out), 3);
    let missing = dir.path().join("absent.json");
    assert_eq!(code(&ldp(&["estimate", "--config", missing.to_str().unwrap()])), 3);
}

#[test]
fn mech_sample_respects_bound() {
    let out = ldp(&[
        "mech-sample", "--mechanism", "linf-ball", "--x", "0.5,-0.5,0.25", "--eps", "1", "--samples", "20",
        "--seed", "3",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .filter(|l| l.starts_with(|c: char| c == '-' || c.is_ascii_digit()))
        .map(|l| l.split(',').map(|v| v.trim().parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 20, "{text}");
    let b = rows[0][0].abs();
    assert!(rows.iter().flatten().all(|v| (v.abs() - b).abs() < 1e-12));
}

#[test]
fn audit_and_rates_succeed() {
    let out = ldp(&["audit", "--max-dim", "3", "--samples", "20000", "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let out = ldp(&["rates", "--kind", "mean", "--n", "100,10000", "--k", "2", "--eps", "1"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3, "{text}");
}
