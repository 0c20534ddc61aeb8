use std::f64::consts::PI;
use std::process::{Command, Output};

use serde_json::Value;

fn sharpext(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sharpext"))
        .args(args)
        .env_remove("SHARPEXT_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).expect("stderr is JSON")
}

#[test]
fn parabola_bound_hits_the_threshold() {
    let v = stdout_json(&sharpext(&["bound", "--p", "2", "--a", "0", "--N", "15"]));
    let sum = v["partial_sum"].as_f64().unwrap();
    assert!((sum - PI / 3f64.sqrt()).abs() <= 1e-10);
    assert!(v["margin"].as_f64().unwrap().abs() <= 1e-10);
    assert_eq!(v["per_term"].as_array().unwrap().len(), 16);
}

#[test]
fn critical_exponent_for_plain_weight() {
    let v = stdout_json(&sharpext(&["critical", "--a", "0", "--N", "15", "--lo", "4", "--hi", "5.5"]));
    assert!((v["p_star"].as_f64().unwrap() - 4.803).abs() <= 1e-3);
    assert!(v["iterations"].as_u64().unwrap() > 0);
    assert!(!v["margin_trace"].as_array().unwrap().is_empty());
}

#[test]
fn profile_rises_toward_the_ends() {
    let out = sharpext(&["profile", "--p", "10", "--a", "0", "--N", "15", "--points", "201"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,value"));
    let rows: Vec<(f64, f64)> = lines
        .map(|l| {
            let (t, g) = l.split_once(',').unwrap();
            (t.parse().unwrap(), g.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 201);
    let at = |t: f64| rows.iter().find(|r| (r.0 - t).abs() < 1e-12).unwrap().1;
    assert!(at(0.0) < at(1.0));
    assert!(at(0.0) < at(-1.0));
}

#[test]
fn output_is_deterministic() {
    let args = ["profile", "--p", "3.5", "--a", "0.2", "--points", "33"];
    assert_eq!(sharpext(&args).stdout, sharpext(&args).stdout);
    let args = ["bound", "--p", "4.2", "--a", "-0.3"];
    assert_eq!(sharpext(&args).stdout, sharpext(&args).stdout);
}

#[test]
fn invalid_parameters_exit_with_two() {
    for args in [
        &["bound", "--p", "1"][..],
        &["bound", "--p", "3", "--a", "-0.7"],
        &["bound", "--p", "3", "--N", "21"],
        &["odd", "--p", "3", "--lambda", "50", "--grid-size", "8192"],
        &["odd", "--p", "3"],
        &["critical", "--lo", "5", "--hi", "4"],
        &["bound", "--p", "not-a-number"],
        &["no-such-command"],
    ] {
        let out = sharpext(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(out.stdout.is_empty());
        let err = stderr_json(&out);
        assert_eq!(err["error"], "validation");
        assert_eq!(err["exit_code"], 2);
    }
}

#[test]
fn help_exits_cleanly() {
    let out = sharpext(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("bound"));
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_sharpext"))
        .args(["bound", "--p", "3"])
        .env("SHARPEXT_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("bound.json")).unwrap()).unwrap();
    assert_eq!(written["p"], 3.0);

    let explicit = dir.path().join("nested/profile.csv");
    let out = sharpext(&["profile", "--p", "3", "--points", "3", "--output", explicit.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(std::fs::read_to_string(explicit).unwrap().lines().count(), 4);
}

#[test]
fn oracle_reports_achieved_tolerances() {
    let v = stdout_json(&sharpext(&["oracle", "--p", "3", "--check", "homogeneity", "--check", "boundary"]));
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 2);
    for c in checks {
        assert_eq!(c["pass"], true);
        assert!(c["achieved"].as_f64().unwrap() <= c["tolerance"].as_f64().unwrap());
    }
}

#[test]
fn report_bundle_passes() {
    let out = sharpext(&["report"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["all_pass"], true);
    for n in v["numbers"].as_array().unwrap() {
        assert!(n["provenance"].is_string());
    }
}

#[test]
fn odd_bound_stays_below_threshold() {
    let v = stdout_json(&sharpext(&["odd", "--p", "3", "--lambda", "50"]));
    assert!(v["margin"].as_f64().unwrap() < 0.0);
    assert!(v["invariant_ratio"].as_f64().unwrap() < 5.0 / 6.0);
}

#[test]
fn odd_scan_csv_columns() {
    let out = sharpext(&["odd", "--p", "3", "--scan", "--a-values", "0"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("p,lambda,a,A,B,bound,threshold,margin"));
    assert_eq!(text.lines().count(), 2);
}
