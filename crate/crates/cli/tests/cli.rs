use std::path::Path;
use std::process::{Command, Output};

fn qdsmds(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_qdsmds"))
        .args(args)
        .output()
        .expect("binary runs");
    assert!(
        out.status.success(),
        "qdsmds {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn calibrate_rho_prints_table() {
    let text = stdout(&qdsmds(&["calibrate-rho", "--epsilon", "10,40"]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "epsilon_deg,rho");
    assert_eq!(lines.len(), 3);
    let rho: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(rho[0] > rho[1] && rho[1] > 1.0);
}

fn simulate_into(dir: &Path, scenario: &str) {
    qdsmds(&[
        "simulate",
        "--scenario",
        scenario,
        "--sigma-d",
        "0.5,1.5",
        "--epsilon",
        "20,40",
        "--trials",
        "3",
        "--seed",
        "11",
        "--workers",
        "2",
        "--out",
        dir.to_str().unwrap(),
    ]);
}

#[test]
fn simulate_writes_tables_config_and_plots() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path(), "2");
    let trials = std::fs::read_to_string(dir.path().join("trials.csv")).unwrap();
    assert!(trials.starts_with("scenario,epsilon,sigma_d,trial,xi_smds,xi_qdsmds"));
    assert_eq!(trials.lines().count(), 1 + 2 * 2 * 3);
    let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1 + 4);
    let cfg = std::fs::read_to_string(dir.path().join("config.toml")).unwrap();
    assert!(cfg.contains("scenario = 2"));
    assert!(dir.path().join("scenario2_eps_20-40.svg").exists());
}

#[test]
fn plot_regenerates_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    simulate_into(dir.path(), "1");
    let figs = tempfile::tempdir().unwrap();
    qdsmds(&[
        "plot",
        dir.path().to_str().unwrap(),
        "--out",
        figs.path().to_str().unwrap(),
    ]);
    let a = std::fs::read(dir.path().join("scenario1_eps_20-40.svg")).unwrap();
    let b = std::fs::read(figs.path().join("scenario1_eps_20-40.svg")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn single_trial_reports_both_estimators() {
    let text = stdout(&qdsmds(&[
        "single-trial",
        "--scenario",
        "1",
        "--sigma-d",
        "0",
        "--epsilon",
        "0",
    ]));
    assert!(text.contains("SMDS: xi ="));
    assert!(text.contains("QD-SMDS: xi ="));
    let rows = text.lines().skip_while(|l| !l.starts_with("target,")).count();
    assert_eq!(rows, 1 + 15);
}

#[test]
fn rejects_bad_scenario() {
    let out = Command::new(env!("CARGO_BIN_EXE_qdsmds"))
        .args(["simulate", "--scenario", "3"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}
