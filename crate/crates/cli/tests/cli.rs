use std::process::{Command, Output};

use serde_json::Value;

fn sqdense(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqdense"))
        .args(args)
        .output()
        .expect("spawn sqdense")
}

fn payload(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON payload")
}

#[test]
fn sf_z_example_value() {
    let out = sqdense(&["sf-z", "--poly", "x^2+1", "--cutoff", "10000"]);
    let v = payload(&out);
    assert_eq!(v["schema"], "sqdense/1");
    assert_eq!(v["command"], "sf-z");
    assert_eq!(v["cutoff"], 10000);
    assert!((v["value"].as_f64().unwrap() - 0.8948).abs() < 1e-3);
    assert_eq!(v["tail"]["rigorous"], false);
    assert!(v["tail"]["low"].as_f64().unwrap() <= 0.0);
    assert!(v["factors"].as_array().unwrap().len() > 1000);
}

#[test]
fn sf_z_square_is_a_precondition_failure() {
    let out = sqdense(&["sf-z", "--poly", "x^2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("precondition"));
}

#[test]
fn syntax_error_is_usage() {
    let out = sqdense(&["sf-z", "--poly", "x +* y"]);
    assert_eq!(out.status.code(), Some(2));
    let out = sqdense(&["empirical", "--poly", "x", "--box", "10", "--mode", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn image_example_ratio() {
    let out = sqdense(&["image", "--poly", "4*x+1", "--bound", "200000"]);
    let v = payload(&out);
    assert!((v["ratio"].as_f64().unwrap() - 0.8106).abs() < 0.01);
    assert_eq!(v["hits"], v["total"].as_u64().map(|t| (v["ratio"].as_f64().unwrap() * t as f64).round() as u64).unwrap());
}

#[test]
fn deterministic_payload_modulo_elapsed() {
    let args = [
        "empirical", "--poly", "x", "--box", "5000", "--mode", "mc:20000", "--seed", "42",
    ];
    let mut a = payload(&sqdense(&args));
    let mut b = payload(&sqdense(&args));
    a.as_object_mut().unwrap().remove("elapsed_ms");
    b.as_object_mut().unwrap().remove("elapsed_ms");
    assert_eq!(a, b);
    assert_eq!(a["seed"], 42);
    assert!(a["half_width"].as_f64().unwrap() > 0.0);
}

#[test]
fn dry_run_validates_without_output() {
    let out = sqdense(&["sf-z", "--poly", "x^2+1", "--cutoff", "999999999", "--dry-run", "--quiet"]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let out = sqdense(&["delta", "--poly", "x^2", "--dry-run"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn csv_emits_rows() {
    let out = sqdense(&["local", "--poly", "x^2+1", "--cutoff", "30", "--csv", "--quiet"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("prime,c,factor"));
    assert_eq!(lines.next(), Some("2,0,1"));
    assert!(text.lines().any(|l| l.starts_with("5,2,")));
}

#[test]
fn function_field_commands() {
    let v = payload(&sqdense(&["sf-a", "--poly", "x", "--ring", "2", "--deg-cutoff", "10"]));
    assert!((v["value"].as_f64().unwrap() - 0.5).abs() < 1e-3);

    let v = payload(&sqdense(&["ec-gamma", "--ring", "5", "--deg-cutoff", "3", "--rd"]));
    assert!((v["value"].as_f64().unwrap() - 0.7697366416427338).abs() < 1e-12);

    let v = payload(&sqdense(&[
        "empirical", "--poly", "x", "--ring", "2", "--box", "12",
    ]));
    assert_eq!(v["hits"], 4097);
    assert_eq!(v["total"], 8192);
}

#[test]
fn quiet_silences_summary() {
    let out = sqdense(&["cf", "--poly", "4*x+1", "--quiet"]);
    assert!(out.status.success());
    assert!(out.stderr.is_empty());
    let v = payload(&out);
    assert!((v["value"].as_f64().unwrap() - 0.8105694691387022).abs() < 1e-12);
}
