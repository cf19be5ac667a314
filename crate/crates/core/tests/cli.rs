use std::path::Path;
use std::process::{Command, Output};

use ftrl_approach::harness::output::{read_steps, read_summary, summary_discrepancy};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ftrl-approach"))
}

fn run(config: &str, dir: &Path) -> Output {
    let cfg = dir.join("config.json");
    std::fs::write(&cfg, config).unwrap();
    let out = dir.join("out");
    bin().args(["run", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap()
}

const SWAP: &str = r#"{
    "problem": "swap",
    "d": 3,
    "T": 1024,
    "seeds": [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
    "environment": {"kind": "uniform_random", "seed": 3}
}"#;

#[test]
fn swap_run_writes_one_row_per_step_and_seed() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(SWAP, dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_steps(&dir.path().join("out/steps.csv")).unwrap();
    assert_eq!(rows.len(), 10 * 1024);
    let summary = read_summary(&dir.path().join("out/summary.json")).unwrap();
    assert_eq!(summary.records.len(), 10);
    assert!(summary_discrepancy(&dir.path().join("out")).unwrap() < 1e-12);

    let header = std::fs::read_to_string(dir.path().join("out/steps.csv")).unwrap();
    let first = header.lines().next().unwrap();
    assert_eq!(first, "seed,t,support_value,bound_value,inner,nu,regret");
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert_eq!(run(SWAP, a.path()).status.code(), Some(0));
    assert_eq!(run(SWAP, b.path()).status.code(), Some(0));
    let read = |d: &Path| std::fs::read(d.join("out/steps.csv")).unwrap();
    assert!(read(a.path()) == read(b.path()));
}

#[test]
fn missing_horizon_is_a_config_error_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": "swap", "d": 3, "seeds": [0], "environment": {"kind": "uniform_random"}}"#;
    let out = run(cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`T`"), "{err}");
}

#[test]
fn unknown_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"problem": "swap", "d": 3, "T": 4, "seeds": [0], "colour": 1,
                  "environment": {"kind": "uniform_random"}}"#;
    let out = run(cfg, dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn slack_breach_exits_with_two_and_flags_the_seed() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
        "problem": "globalcost", "d": 3, "p": "inf", "T": 64, "seeds": [5],
        "environment": {"kind": "uniform_random"},
        "cut_budget": 1, "nu_hard_limit": 1e-12, "support_every_step": false
    }"#;
    let out = run(cfg, dir.path());
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = read_summary(&dir.path().join("out/summary.json")).unwrap();
    assert_eq!(summary.records[0].seed, 5);
    assert!(summary.records[0].aborted.is_some());
}

#[test]
fn sweep_writes_a_row_per_horizon() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(
        &cfg,
        r#"{"problem": "swap", "d": 3, "T": 1, "seeds": [0, 1],
            "environment": {"kind": "uniform_random"}}"#,
    )
    .unwrap();
    let out = dir.path().join("out");
    let run = bin()
        .args(["sweep", "--config"])
        .arg(&cfg)
        .args(["--T", "64,128,256,512", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0));
    let text = std::fs::read_to_string(out.join("rates.csv")).unwrap();
    let data: Vec<&str> = text.lines().filter(|l| l.starts_with(|c: char| c.is_ascii_digit())).collect();
    assert_eq!(data.len(), 4, "{text}");
}

#[test]
fn unknown_suite_fails() {
    let out = bin().args(["verify", "--suite", "nonsense"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}
