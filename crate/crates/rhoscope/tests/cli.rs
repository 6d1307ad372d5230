//! Integration tests for the `rhoscope` binary: exit codes, file formats,
//! seed overrides, and reproducibility contracts.

use std::path::Path;
use std::process::{Command, Output};

use rhoscope::run::recompute_metrics;
use rhoscope::run::RunReport;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rhoscope"))
}

fn write_config(dir: &Path, body: serde_json::Value) -> String {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    path.to_str().unwrap().to_string()
}

fn run_ok(args: &[&str]) -> Output {
    let out = bin().args(args).output().unwrap();
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

#[test]
fn plan_counts_match_schemes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "minimal",
            "dim": 4,
            "state": {"kind": "ginibre", "rank": 4, "seed": 1},
            "out_dir": out
        }),
    );
    let stdout = String::from_utf8(run_ok(&["plan", "--config", &cfg]).stdout).unwrap();
    assert!(stdout.contains("16 projectors"), "stdout: {stdout}");

    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "operator_basis",
            "dim": 4,
            "state": {"kind": "ginibre", "rank": 4, "seed": 1},
            "out_dir": out
        }),
    );
    let stdout = String::from_utf8(run_ok(&["plan", "--config", &cfg]).stdout).unwrap();
    assert!(stdout.contains("28 projectors"), "stdout: {stdout}");
}

#[test]
fn missing_dim_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "minimal",
            "state": {"kind": "ginibre", "rank": 2, "seed": 1}
        }),
    );
    let out = bin().args(["plan", "--config", &cfg]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin().args(["plan"]).output().unwrap();
    assert_eq!(
        out.status.code(),
        Some(2),
        "missing --config should be a config error"
    );
}

#[test]
fn degenerate_angles_exit_with_numeric_code() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "minimal",
            "dim": 3,
            "angles": {"alpha": 0.0, "beta": std::f64::consts::PI, "mag_a": 1.0, "mag_b": 1.0},
            "state": {"kind": "ginibre", "rank": 3, "seed": 1},
            "out_dir": dir.path().join("out")
        }),
    );
    let out = bin().args(["plan", "--config", &cfg]).output().unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn corrupted_expectations_report_parse_location() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "minimal",
            "dim": 3,
            "state": {"kind": "ginibre", "rank": 3, "seed": 2},
            "out_dir": out_dir
        }),
    );
    run_ok(&["simulate", "--config", &cfg]);
    let exp = out_dir.join("expectations.json");
    let mut text = std::fs::read_to_string(&exp).unwrap();
    text.insert(40, '#');
    std::fs::write(&exp, text).unwrap();
    let out = bin()
        .args(["reconstruct", "--config", &cfg])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("line"),
        "stderr should carry a line number: {stderr}"
    );
}

#[test]
fn exact_round_trip_and_recomputable_metrics() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "minimal",
            "dim": 5,
            "state": {"kind": "ginibre", "rank": 2, "seed": 37},
            "out_dir": out_dir
        }),
    );
    run_ok(&["simulate", "--config", &cfg]);
    run_ok(&["reconstruct", "--config", &cfg]);

    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let metrics = report.metrics.unwrap();
    assert!(
        metrics.fidelity > 1.0 - 1e-9,
        "fidelity {}",
        metrics.fidelity
    );

    let recomputed = recompute_metrics(&out_dir).unwrap();
    assert!((recomputed.fidelity - metrics.fidelity).abs() < 1e-12);
    assert!((recomputed.trace_distance - metrics.trace_distance).abs() < 1e-12);
    assert!((recomputed.max_element_error - metrics.max_element_error).abs() < 1e-12);
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "minimal",
            "dim": 3,
            "state": {"kind": "ginibre", "rank": 3, "seed": 5},
            "shots": {"shots": 2000, "seed": 77}
        }),
    );
    run_ok(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        out_a.to_str().unwrap(),
    ]);
    run_ok(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        out_b.to_str().unwrap(),
    ]);
    let a = std::fs::read(out_a.join("expectations.json")).unwrap();
    let b = std::fs::read(out_b.join("expectations.json")).unwrap();
    assert_eq!(a, b);

    // A different seed changes the draws.
    let out_c = dir.path().join("c");
    run_ok(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        out_c.to_str().unwrap(),
        "--seed",
        "78",
    ]);
    let c = std::fs::read(out_c.join("expectations.json")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn env_seed_is_lowest_priority() {
    let dir = tempfile::tempdir().unwrap();
    let out_env = dir.path().join("env");
    let out_flag = dir.path().join("flag");
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "minimal",
            "dim": 2,
            "state": {"kind": "ginibre", "rank": 2, "seed": 5},
            "shots": {"shots": 500}
        }),
    );
    // Seed comes from the environment when neither flag nor config give one.
    let out = bin()
        .args([
            "simulate",
            "--config",
            &cfg,
            "--out",
            out_env.to_str().unwrap(),
        ])
        .env("TOMO_SEED", "123")
        .output()
        .unwrap();
    assert!(out.status.success());
    // The flag wins over the environment.
    let out = bin()
        .args([
            "simulate",
            "--config",
            &cfg,
            "--out",
            out_flag.to_str().unwrap(),
            "--seed",
            "123",
        ])
        .env("TOMO_SEED", "999")
        .output()
        .unwrap();
    assert!(out.status.success());
    let a = std::fs::read(out_env.join("expectations.json")).unwrap();
    let b = std::fs::read(out_flag.join("expectations.json")).unwrap();
    assert_eq!(a, b, "flag seed 123 must reproduce env seed 123");
}

#[test]
fn optics_pipeline_with_efficiency() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "optics",
            "dim": 3,
            "cutoff": 5,
            "state": {"kind": "ginibre", "rank": 3, "seed": 11},
            "shots": {"shots": 200000, "seed": 4, "efficiency": 0.7},
            "out_dir": out_dir
        }),
    );
    run_ok(&["optics", "--config", &cfg, "--check-probe-shift"]);
    for file in [
        "rho_hat.json",
        "rho_true.json",
        "report.json",
        "metrics.csv",
        "bands.csv",
        "p_redundancy.csv",
        "element_errors.csv",
        "probe_shift.csv",
    ] {
        assert!(out_dir.join(file).exists(), "missing {file}");
    }
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    let metrics = report.metrics.unwrap();
    // 2e5 shots per histogram at eta = 0.7: a loose sanity bound.
    assert!(
        metrics.trace_distance < 0.25,
        "trace distance {}",
        metrics.trace_distance
    );
    assert!(report.probe_shift_max_discrepancy.unwrap() < 1e-8);
}

#[test]
fn sweep_single_trial_leaves_std_empty() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "minimal",
            "dim": 2,
            "state": {"kind": "ginibre", "rank": 2, "seed": 1},
            "shots": {"shots": 1000, "seed": 2},
            "sweep": {"levels": [500, 5000], "trials": 1, "compare_triple": true},
            "out_dir": out_dir
        }),
    );
    run_ok(&["sweep", "--config", &cfg]);
    let csv = std::fs::read_to_string(out_dir.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "level,trials,mean_trace_distance,std_trace_distance,mse_rj_pair,mse_rj_triple"
    );
    for line in lines {
        // std column is empty for a single trial: two adjacent commas.
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 6);
        assert!(fields[3].is_empty(), "std should be empty: {line}");
        assert!(!fields[4].is_empty() && !fields[5].is_empty());
    }
}

#[test]
fn exact_flag_drops_shot_noise() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let cfg = write_config(
        dir.path(),
        serde_json::json!({
            "mode": "minimal",
            "dim": 3,
            "state": {"kind": "ginibre", "rank": 3, "seed": 8},
            "shots": {"shots": 100, "seed": 3},
            "out_dir": out_dir
        }),
    );
    run_ok(&["simulate", "--config", &cfg, "--exact"]);
    run_ok(&["reconstruct", "--config", &cfg, "--exact"]);
    let report: RunReport =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert!(report.metrics.unwrap().max_element_error < 1e-10);
}
