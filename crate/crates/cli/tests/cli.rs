//! End-to-end CLI checks: artifact determinism (same seed, same bytes),
//! exit codes and the documented command examples.

use std::fs;
use std::process::Command;

fn normlab() -> Command {
    Command::new(env!("CARGO_BIN_EXE_normlab"))
}

#[test]
fn verify_all_is_byte_deterministic() {
    // Acceptance: two runs of `verify --all --seed 7` produce
    // byte-identical JSON artifacts.
    let dir = tempfile::tempdir().unwrap();
    let f1 = dir.path().join("run1.json");
    let f2 = dir.path().join("run2.json");
    for f in [&f1, &f2] {
        let status = normlab()
            .args([
                "verify",
                "--all",
                "--seed",
                "7",
                "--out",
                f.to_str().unwrap(),
            ])
            .status()
            .unwrap();
        assert!(status.success(), "verify run failed");
    }
    let b1 = fs::read(&f1).unwrap();
    let b2 = fs::read(&f2).unwrap();
    assert!(!b1.is_empty());
    assert_eq!(b1, b2, "verify artifacts differ between identical runs");
    println!("PASS criterion-13 determinism: {} identical bytes", b1.len());
}

#[test]
fn verify_single_suite_table() {
    let out = normlab()
        .args(["verify", "--suite", "determinant", "--seed", "7"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("PASS"));
    assert!(text.contains("determinant-axioms"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn diagnose_cube_preset_reports_floor() {
    let out = normlab()
        .args(["diagnose", "--preset", "cube-3e1", "--k", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let floor = v["floor"].as_f64().unwrap();
    assert!((floor - 4.0).abs() < 1e-9, "floor {floor}");
    assert_eq!(v["report"]["verdict"], "stalls-above-floor");
}

#[test]
fn modulus_example_matches_grid_oracle_window() {
    let out = normlab()
        .args([
            "modulus", "--space", "lp:2:3", "--mode", "kur", "--k", "1", "--eps", "1.0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let value = v["results"][0]["estimate"]["value"].as_f64().unwrap();
    assert!((value - 0.1340).abs() <= 0.02, "value {value}");
}

#[test]
fn det_command_evaluates_and_scans() {
    let out = normlab()
        .args([
            "det",
            "--space",
            "lp:2:3",
            "--points",
            "[[0,0,0],[1,0,0],[0,1,0],[0.5,0.5,0]]",
            "--functionals",
            "[[1,0,0],[0,1,0],[0,0,1]]",
            "--scan",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["scan"]["entries"].as_array().unwrap().len() == 12);
}

#[test]
fn volume_command_exact_square() {
    let out = normlab()
        .args([
            "volume",
            "--space",
            "lp:inf:3",
            "--k",
            "2",
            "--points",
            "[[0,0,0],[0,2,0],[0,0,2]]",
            "--mode",
            "exact",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 4.0).abs() < 1e-10);
}

#[test]
fn validation_error_exits_one() {
    let out = normlab()
        .args(["volume", "--space", "lp:0.5:3", "--points", "[[0,0,0],[1,0,0]]"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("p must satisfy"), "stderr: {err}");

    let out = normlab()
        .args(["verify", "--suite", "not-a-suite"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn zoo_build_round_trips() {
    let out = normlab().args(["zoo", "--build", "sullivan-4"]).output().unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["variant"], "sullivan_sum");
    assert_eq!(v["indices"], serde_json::json!([1, 2]));
}

#[test]
fn quotient_sweep_csv_has_versioned_header() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("sweep.csv");
    let out = normlab()
        .args([
            "quotient-sweep",
            "--space",
            "lp:2:4",
            "--functionals",
            "[[1,0,0,0]]",
            "--subspaces",
            "[[[0,0,0,1]]]",
            "--eps",
            "1.0",
            "--budget",
            "8,100",
            "--format",
            "csv",
            "--out",
            f.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&f).unwrap();
    assert!(text.starts_with("# normlab sweep csv v1"));
    assert!(text.contains("eps,mode,value,converged"));
}

#[test]
fn project_command_samples_face() {
    let out = normlab()
        .args([
            "project",
            "--space",
            "lp:inf:3",
            "--set",
            r#"{"variant":"unit_ball"}"#,
            "--point",
            "[3,0,0]",
            "--delta",
            "0.0",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["distance"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    for s in v["samples"].as_array().unwrap() {
        assert!((s[0].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn product_witness_command() {
    let cfg = r#"{
        "p": 2.0,
        "factors": [
            {"variant":"lp","p":"inf","dim":2},
            {"variant":"lp","p":"inf","dim":2}
        ],
        "witnesses": [
            {"x":[1,1],"y":[1,-1],"functional":[0,1]},
            {"x":[1,1],"y":[1,-1],"functional":[0,1]}
        ]
    }"#;
    let out = normlab()
        .args(["product-witness", "--config", cfg])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let det = v["result"]["determinant"].as_f64().unwrap();
    assert!((det.abs() - 2.0).abs() < 1e-10);
    assert!(v["result"]["identity_error"].as_f64().unwrap() < 1e-10);
}
