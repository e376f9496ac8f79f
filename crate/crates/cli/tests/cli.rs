use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

fn twoproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_twoproj")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

#[test]
fn canonical_factorization_of_fixture() {
    let out = twoproj(&["canonical", &fixture("t.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(num(&v["residual"]) < 1e-12);
    assert!((num(&v["norm_p_minus_q"]) - 0.8).abs() < 1e-12);
    let q = &v["q"]["re"];
    assert!((num(&q[0][1]) - 0.48).abs() < 1e-12);
    assert!((num(&q[1][1]) - 0.64).abs() < 1e-12);
}

#[test]
fn check_x_rejects_half_diagonal() {
    let out = twoproj(&["check-x", &fixture("half.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json(&out)["verdict"], Value::Bool(false));
    let out = twoproj(&["check-x", "--criterion", "sebestyen", &fixture("t.json")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn library_refusals_exit_one() {
    let out = twoproj(&["canonical", &fixture("half.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["reason"].as_str().unwrap().contains("not a product"));
}

#[test]
fn is_jx_verdicts() {
    assert_eq!(twoproj(&["is-jx", &fixture("nilpotent.json")]).status.code(), Some(1));
    let out = twoproj(&["is-jx", &fixture("v.json")]);
    assert_eq!(out.status.code(), Some(0));
    let sq = &json(&out)["square"]["re"];
    assert!((num(&sq[0][0]) - 0.36).abs() < 1e-12);
}

#[test]
fn pinv_proj_of_fixture() {
    let v = json(&twoproj(&["pinv-proj", &fixture("t.json")]));
    assert!((num(&v["e"]["re"][1][0]) - 4.0 / 3.0).abs() < 1e-12);
    assert!((num(&v["smallest_singular_value"]) - 0.6).abs() < 1e-12);
}

#[test]
fn pair_commands() {
    let (p, q) = (fixture("p.json"), fixture("q.json"));
    for cmd in ["ando-extract", "sqrt-solutions", "halmos", "classify"] {
        let out = twoproj(&[cmd, &p, &q]);
        assert_eq!(out.status.code(), Some(0), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let v = json(&twoproj(&["halmos", &p, &q]));
    assert!((num(&v["cosines"][0]) - 0.6).abs() < 1e-12);
    assert!((num(&v["gap"]) - 0.8).abs() < 1e-12);
    let v = json(&twoproj(&["classify", &p, &q]));
    assert_eq!(v["case"], 1);
}

#[test]
fn span_commands() {
    let (m, n) = (fixture("e1.json"), fixture("u.json"));
    let v = json(&twoproj(&["angles", &m, &n]));
    assert!((num(&v["friedrichs_cos"]) - 0.6).abs() < 1e-12);
    let v = json(&twoproj(&["oblique", &m, &n]));
    assert_eq!(v["pinv_in_x"], Value::Bool(true));
    assert!(num(&v["idempotent_residual"]) < 1e-12);
}

#[test]
fn input_errors_exit_two() {
    let out = twoproj(&["check-y", &fixture("ragged.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("row 1"));
    assert_eq!(twoproj(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(twoproj(&["verify", "--dims", "0"]).status.code(), Some(2));
    assert_eq!(twoproj(&["--version"]).status.code(), Some(0));
}

#[test]
fn out_and_text_format() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.txt");
    let out = twoproj(&["--format", "text", "--out", path.to_str().unwrap(), "canonical", &fixture("t.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l.starts_with("unique") && l.ends_with("true")), "{text}");
}

#[test]
fn verify_small_ensemble_is_reproducible() {
    let args = ["verify", "--seed", "7", "--dims", "2,3", "--trials", "5"];
    let a = twoproj(&args);
    let b = twoproj(&args);
    assert_eq!(a.status.code(), Some(0));
    let (mut a, mut b) = (json(&a), json(&b));
    assert_eq!(a["pass"], Value::Bool(true));
    assert_eq!(a["input_digest"].as_str().unwrap().len(), 64);
    a.as_object_mut().unwrap().remove("timestamp");
    b.as_object_mut().unwrap().remove("timestamp");
    assert_eq!(a, b);
}
