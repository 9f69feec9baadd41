//! The command-line front end, run as a subprocess.

use std::path::Path;
use std::process::{Command, Output};

fn elegance(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_elegance"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn fixture(dir: &Path) {
    let out = elegance(&["fixture", "--scale", "cbs", "--out", "cbs.json"], dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bad_designer_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    for spec in ["purist:beauty", "constant:9", "random", "sometimes"] {
        let out = elegance(
            &[
                "evolve",
                "--problem",
                "cbs.json",
                "--designer",
                spec,
                "--out",
                "x.jsonl",
            ],
            dir.path(),
        );
        assert_eq!(out.status.code(), Some(2), "{spec}");
        assert!(!dir.path().join("x.jsonl").exists());
    }
}

#[test]
fn missing_problem_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let out = elegance(
        &[
            "evolve",
            "--problem",
            "nope.json",
            "--designer",
            "constant:3",
            "--out",
            "x.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope.json"));
}

#[test]
fn batch_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    let args = [
        "evolve",
        "--problem",
        "cbs.json",
        "--pop",
        "20",
        "--max-gen",
        "40",
        "--interval",
        "2",
        "--designer",
        "purist:nac",
        "--batch",
        "30",
        "--out",
        "logs",
    ];
    let out = elegance(&args, dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let mut names: Vec<String> = std::fs::read_dir(dir.path().join("logs"))
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names.len(), 30);
    assert_eq!(names[0], "CBS-seed001.jsonl");
    assert_eq!(names[29], "CBS-seed030.jsonl");

    let out = elegance(
        &["analyze", "--logs", "logs/*.jsonl", "--out", "report.tsv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let tsv = std::fs::read_to_string(dir.path().join("report.tsv")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), tsv);
    assert_eq!(tsv.lines().count(), 13);
    assert!(tsv.starts_with("reward\tstatistic\tNAC Elegance\tEC Elegance\tIU Elegance\tATMR Elegance\n"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("report.tsv.json")).unwrap()).unwrap();
    assert_eq!(report["logs"], 30);
    assert_eq!(report["correlation"]["cells"].as_array().unwrap().len(), 16);
}

#[test]
fn single_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    fixture(dir.path());
    for out in ["a.jsonl", "b.jsonl"] {
        let args = [
            "evolve",
            "--problem",
            "cbs.json",
            "--pop",
            "20",
            "--max-gen",
            "25",
            "--designer",
            "random:5",
            "--seed",
            "9",
            "--out",
            out,
        ];
        assert!(elegance(&args, dir.path()).status.success());
    }
    let a = std::fs::read(dir.path().join("a.jsonl")).unwrap();
    assert_eq!(a, std::fs::read(dir.path().join("b.jsonl")).unwrap());
    assert!(!a.is_empty());
}

#[test]
fn analyze_without_matches_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = elegance(&["analyze", "--logs", "none/*.jsonl", "--out", "r.tsv"], dir.path());
    assert!(!out.status.success());
}
