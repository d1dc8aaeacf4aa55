//! End-to-end smoke tests for the installed binary: exit codes, artifact
//! files, and guard behavior.

use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_clforge"))
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("clforge_cli_{tag}_{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn construct_writes_tables_and_reports_sizes() {
    let dir = scratch("construct");
    let out = bin()
        .args(["construct", "--p", "2", "--n", "1"])
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("x = 3"), "{stdout}");
    assert!(stdout.contains("|M| = 21"), "{stdout}");
    let csv = std::fs::read_to_string(dir.join("lines_p2_n1.csv")).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 22); // header + 21 rows
    assert!(dir.join("construction_p2_n1.json").exists());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_passes_and_fails_with_documented_exit_codes() {
    let ok = bin()
        .args(["verify", "--p", "2", "--n", "1", "--checks", "tight,spreads", "--out"])
        .arg(scratch("verify").join("reports.json"))
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));

    let usage = bin()
        .args(["verify", "--p", "2", "--n", "1", "--checks", "bogus"])
        .output()
        .unwrap();
    assert_eq!(usage.status.code(), Some(2));

    let bad_field = bin().args(["verify", "--p", "7", "--n", "1"]).output().unwrap();
    assert_eq!(bad_field.status.code(), Some(2), "q = 7 is 1 mod 3");
}

#[test]
fn oracle_guard_needs_force() {
    let refused = bin().args(["oracle", "--p", "23", "--n", "1"]).output().unwrap();
    assert_eq!(refused.status.code(), Some(2));

    let ok = bin()
        .args(["oracle", "--p", "2", "--n", "1", "--sample", "exhaustive", "--out", "-"])
        .output()
        .unwrap();
    assert_eq!(ok.status.code(), Some(0));
    let bundle: serde_json::Value = serde_json::from_slice(&ok.stdout).unwrap();
    assert_eq!(bundle.as_array().unwrap().len(), 8);
}
