mod common;

use std::fs;
use std::process::{Command, Output};

use chordguard::trace::TRACE_FIELDS;
use common::workspace_dir;

fn chordguard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chordguard")).args(args).output().unwrap()
}

fn square_20() -> String {
    workspace_dir().join("square-20.json").display().to_string()
}

#[test]
fn constants_prints_the_table() {
    let out = chordguard(&["constants"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["alpha_star", "k_v", "k_h", "alpha_kh", "second_derivative"] {
        assert!(text.contains(name), "{text}");
    }
    assert!(!text.contains("NO"));

    let out = chordguard(&["constants", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 5);
}

#[test]
fn simulate_captures_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let out = chordguard(&[
        "simulate", "--workspace", &square_20(), "--policy", "greedy_runner", "--seed", "7",
        "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("captured"));
    let text = fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(!lines.is_empty());
    for line in &lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        let mut sorted = keys.clone();
        sorted.sort_unstable();
        let mut expected = TRACE_FIELDS.to_vec();
        expected.sort_unstable();
        assert_eq!(sorted, expected);
    }
    assert!(lines.last().unwrap().contains("\"captured\":true"));
}

#[test]
fn explicit_starts_are_used() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let out = chordguard(&[
        "simulate", "--workspace", &square_20(), "--policy", "stationary", "--pursuer", "3,3,-1.2",
        "--evader", "15,15", "--trace", trace.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let first = fs::read_to_string(&trace).unwrap().lines().next().unwrap().to_string();
    assert!(first.contains("\"x\":15.0,\"y\":15.0"), "{first}");
}

#[test]
fn bound_exceeded_exits_two() {
    let out = chordguard(&["simulate", "--workspace", &square_20(), "--policy", "greedy_runner", "--max-steps", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"vertices\": [[0,0], [1,").unwrap();
    let out = chordguard(&["simulate", "--workspace", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stderr).unwrap().contains("parse error"));

    let out = chordguard(&["simulate", "--workspace", &square_20(), "--policy", "teleporter"]);
    assert_eq!(out.status.code(), Some(1));
    let out = chordguard(&["simulate", "--workspace", &square_20(), "--evader", "1,2,3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = chordguard(&["simulate", "--workspace", &square_20(), "--pursuer", "2,2,0", "--evader", "3,3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = chordguard(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn batch_writes_csv_in_spec_order() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    let body = serde_json::json!({
        "rows": [
            {"workspace": workspace_dir().join("heptagon.json"), "policy": "corner_hugger", "seeds": [3, 4]},
            {"workspace": workspace_dir().join("square-20.json"), "policy": "random", "seeds": [1, 1], "epsilon": 1.0}
        ],
        "output": "out.csv"
    });
    fs::write(&spec, body.to_string()).unwrap();
    let out = chordguard(&["batch", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("out.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(
        lines[0],
        "workspace,policy,seed,epsilon,diam,bound,steps_to_capture,establishment_steps,zigzag_count,follow_count,captured"
    );
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("heptagon,corner_hugger,3,"));
    assert!(lines[2].starts_with("heptagon,corner_hugger,4,"));
    assert!(lines[3].starts_with("square-20,random,1,"));
    assert!(lines[1..].iter().all(|l| l.ends_with(",true")));

    fs::write(&spec, r#"{"rows": []}"#).unwrap();
    let out = chordguard(&["batch", spec.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}
