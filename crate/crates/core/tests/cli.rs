use std::process::{Command, Output};

use serde_json::Value;

fn bellstat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellstat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn every_preset_runs() {
    for preset in [
        "wigner-uniform",
        "marble-bag",
        "quantum-60",
        "multiplicity-counterexample",
    ] {
        let v = json(&bellstat(&["--preset", preset, "--samples", "1000"]));
        assert_eq!(v["meta"]["tool"], "bellstat");
        assert_eq!(v["meta"]["schema_version"], 1);
        assert!(v["results"]["command"].is_string(), "{preset}");
    }
}

#[test]
fn exact_uniform_table() {
    let v = json(&bellstat(&["exact", "--table", "1,1,1,1,1,1,1,1"]));
    let probs = v["results"]["probabilities"].as_array().unwrap();
    assert_eq!(probs[0]["exact"]["numerator"], 2);
    assert_eq!(probs[0]["exact"]["denominator"], 8);
    assert_eq!(v["results"]["check"]["holds"], true);
}

#[test]
fn quantum_reports_violation() {
    let v = json(&bellstat(&[
        "quantum",
        "--axes-spacing",
        "60",
        "--samples",
        "10000",
        "--steps",
        "1",
    ]));
    let point = &v["results"]["scan"][0];
    assert_eq!(point["violated"], true);
    assert!((point["lhs"].as_f64().unwrap() - 0.375).abs() < 1e-12);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"command":"simulate","samples":500,"seed":1}"#).unwrap();
    let v = json(&bellstat(&["--config", path.to_str().unwrap(), "--seed", "9"]));
    assert_eq!(v["config"]["seed"], 9);
    assert_eq!(v["config"]["samples"], 500);
}

#[test]
fn csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let out = bellstat(&[
        "entropy",
        "--omegas",
        "1,2,3,4,5,6,7,8",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), "population,omega,entropy,entropy_ratio");
    assert_eq!(text.lines().count(), 9);
}

#[test]
fn thread_count_does_not_change_results() {
    let args = ["simulate", "--samples", "100000", "--seed", "5"];
    let one = json(&bellstat(&[&args[..], &["--threads", "1"]].concat()));
    let four = json(&bellstat(&[&args[..], &["--threads", "4"]].concat()));
    assert_eq!(one["results"], four["results"]);
}

#[test]
fn validation_errors_exit_2() {
    for args in [
        &["exact", "--table", "1,2,3"][..],
        &["exact", "--table", "1,-1,0,0,0,0,0,0"],
        &["entropy", "--omegas", "1,1,1,0,1,1,1,1"],
        &["--preset", "no-such-preset"],
        &["simulate", "--samples", "0"],
        &["drain", "--table", "0,0,0,0,0,0,0,0"],
    ] {
        let out = bellstat(args);
        assert_eq!(
            out.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn missing_config_file_exits_3() {
    let out = bellstat(&["exact", "--config", "/nonexistent/config.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn unwritable_output_exits_3() {
    let out = bellstat(&["exact", "--out", "/nonexistent/dir/out.json"]);
    assert_eq!(out.status.code(), Some(3));
}
