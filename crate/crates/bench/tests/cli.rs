use std::path::PathBuf;
use std::process::{Command, Output};

fn bench(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dsgs-bench"))
        .args(args)
        .output()
        .unwrap()
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn solve_writes_a_trace() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bench(&[
        "solve",
        "--config",
        &config("gaussian-40x20-dsgs.json"),
        "--seed",
        "4",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = dsgs_bench::read_trace_csv(&dir.path().join("gaussian-40x20-dsgs-seed4.csv")).unwrap();
    assert!(trace.last().unwrap().x_error.unwrap() <= 1e-10);
}

#[test]
fn experiment_writes_report_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bench(&[
        "--quiet",
        "experiment",
        "--preset",
        "gaussian-40x20-rk",
        "--seeds",
        "1,2",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(o.stdout.is_empty());
    let report: dsgs_bench::ExperimentReport =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report.runs.len(), 2);

    let o = bench(&[
        "experiment",
        "--config",
        &config("feasible-10x20-dsap.json"),
        "--seeds",
        "5",
        "--out",
        out,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let cfg = dsgs_bench::ExperimentConfig::load(std::path::Path::new(&config("feasible-10x20-dsap.json"))).unwrap();
    let traces = dir.path().join(cfg.outputs.traces.unwrap());
    assert!(traces.join("feasible-10x20-dsap-seed5.csv").exists());
    assert!(dir.path().join(cfg.outputs.report.unwrap()).exists());
}

#[test]
fn strict_truncation_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let cfg = config("example1-sor-cyclic.json");
    assert_eq!(bench(&["solve", "--config", &cfg, "--out", out]).status.code(), Some(0));
    assert_eq!(
        bench(&["solve", "--config", &cfg, "--out", out, "--strict"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        bench(&["experiment", "--config", &cfg, "--out", out, "--strict"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn config_errors_exit_one() {
    assert_eq!(bench(&["solve"]).status.code(), Some(1));
    assert_eq!(bench(&["solve", "--preset", "no-such-preset"]).status.code(), Some(1));
    assert_eq!(bench(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(bench(&["demo", "example1", "--tau", "0.5"]).status.code(), Some(1));
    assert_eq!(
        bench(&[
            "simulate-messages",
            "--solver",
            "dsgs",
            "--m",
            "4",
            "--n",
            "4",
            "--epochs",
            "1",
            "--workers",
            "0"
        ])
        .status
        .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"schema_version": 1, "name": "x"}"#).unwrap();
    assert_eq!(
        bench(&["solve", "--config", bad.to_str().unwrap()]).status.code(),
        Some(1)
    );
}

#[test]
fn missing_files_exit_two() {
    let o = bench(&["solve", "--config", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn message_simulation_prints_totals() {
    let o = bench(&[
        "simulate-messages",
        "--solver",
        "dsgs",
        "--m",
        "40",
        "--n",
        "20",
        "--epochs",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).contains("= 120"));
}

#[test]
fn demo_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = bench(&["demo", "example2-spectral", "--out", out]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(dir.path().join("example2-spectral.csv")).unwrap();
    assert!(csv.starts_with("ordering,spectral_radius\n"));
}

#[test]
fn presets_can_be_written() {
    let dir = tempfile::tempdir().unwrap();
    let o = bench(&["presets", "--write", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let listed = String::from_utf8_lossy(&o.stdout).lines().count();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), listed);
    assert_eq!(listed, dsgs_bench::presets::all().len());
}
