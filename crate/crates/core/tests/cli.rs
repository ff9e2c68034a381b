//! The `dg` binary end to end: exit codes and stream discipline.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn dg(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dg"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

const SQUARE: &str = r#"{"K":2,"n":4,"edges":[{"u":1,"v":2,"d":1},{"u":1,"v":3,"d":1.4142135623730951},{"u":2,"v":3,"d":1},{"u":2,"v":4,"d":1.4142135623730951},{"u":3,"v":4,"d":1},{"u":1,"v":4,"d":1}]}"#;

#[test]
fn solve_bp_reads_a_file() {
    let path = std::env::temp_dir().join(format!("dg-square-{}.json", std::process::id()));
    std::fs::write(&path, SQUARE).unwrap();
    let out = dg(&["solve-bp", "--in", path.to_str().unwrap()], "");
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["solutions"].as_array().unwrap().len(), 1);
}

#[test]
fn laman_verdict_on_k4() {
    let out = dg(&["rigidity", "--mode", "laman"], SQUARE);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v, serde_json::json!({"laman": false}));
}

#[test]
fn unknown_subcommand() {
    let out = dg(&["nosuchcmd"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn an_empty_solution_set_is_still_a_success() {
    // Partition instance [1, 2, 4] has no balanced split.
    let out = dg(&["reduce-partition"], "[1,2,4]");
    let inst = String::from_utf8(out.stdout).unwrap();
    let out = dg(&["solve-bp"], &inst);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["solutions"].as_array().unwrap().is_empty());
}

#[test]
fn malformed_input_is_an_error() {
    let out = dg(&["validate", "--x", "/nonexistent.json"], SQUARE);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}
