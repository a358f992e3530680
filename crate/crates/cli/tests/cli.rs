use std::io::Write;
use std::process::Command;

use cicy_cli::{run, Outcome};
use serde_json::Value;
use tempfile::NamedTempFile;

const P333: &str = r#"{"factors":[3,3,3],"degrees":[[1,1,2],[1,2,1],[2,1,1]],"strict_cy":true}"#;
const P112: &str = r#"{"factors":[1,1,2],"degrees":[[2,2,3]]}"#;
const P1: &str = r#"{"factors":[1],"degrees":[],"strict_cy":false}"#;

fn input(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn cicy(args: &[&str]) -> Outcome {
    run(std::iter::once("cicy").chain(args.iter().copied()))
}

fn ok_doc(args: &[&str]) -> Value {
    let out = cicy(args);
    assert_eq!(out.code, 0, "stdout: {} stderr: {}", out.stdout, out.stderr);
    assert_round_trip(&out.stdout);
    serde_json::from_str(&out.stdout).unwrap()
}

fn err_doc(args: &[&str]) -> Value {
    let out = cicy(args);
    assert_eq!(out.code, 2, "stdout: {}", out.stdout);
    assert_round_trip(&out.stdout);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    v["error"].clone()
}

fn assert_round_trip(text: &str) {
    let v: Value = serde_json::from_str(text).unwrap();
    let mut again = serde_json::to_string_pretty(&v).unwrap();
    again.push('\n');
    assert_eq!(again, text);
}

fn strs(v: &Value) -> Vec<String> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_str().unwrap().to_string())
        .collect()
}

#[test]
fn check_certifies_p333() {
    let f = input(P333);
    let doc = ok_doc(&["check", "--input", f.path().to_str().unwrap()]);
    assert_eq!(doc["J"], serde_json::json!([1, 2, 3]));
    assert_eq!(doc["lorentzian"], Value::Bool(true));
    assert_eq!(doc["signature"], serde_json::json!([2, 1, 0]));
    assert_eq!(doc["b"][0][1], 7);
    assert_eq!(strs(&doc["gram"][0]), ["1", "-7/2", "-7/2"]);
    assert!(doc.get("notice").is_none());
}

#[test]
fn check_on_the_degenerate_p112() {
    let f = input(P112);
    let doc = ok_doc(&["check", "--input", f.path().to_str().unwrap()]);
    assert_eq!(doc["J"], serde_json::json!([1, 2]));
    assert_eq!(doc["lorentzian"], Value::Bool(false));
    assert_eq!(doc["signature"], serde_json::json!([1, 0, 1]));
    let terms = doc["volume_polynomial"]["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 3);
}

#[test]
fn check_reports_fewer_divisors_than_minimal_dimension() {
    let f = input(r#"{"factors":[3,3],"degrees":[[2,2]],"strict_cy":false}"#);
    let doc = ok_doc(&["check", "--input", f.path().to_str().unwrap()]);
    assert!(doc["notice"].is_string());
}

#[test]
fn vol_of_the_ample_class() {
    let f = input(P112);
    let doc = ok_doc(&[
        "vol",
        "--input",
        f.path().to_str().unwrap(),
        "--class",
        "1,1,1",
    ]);
    assert_eq!(doc["volume"], "30");
    let doc = ok_doc(&[
        "vol",
        "--input",
        f.path().to_str().unwrap(),
        "--class",
        "-1,3,4",
    ]);
    assert_eq!(doc["volume"], "30");
    let doc = ok_doc(&[
        "vol",
        "--input",
        f.path().to_str().unwrap(),
        "--class",
        "1/2,1/2,1/2",
    ]);
    assert_eq!(doc["volume"], "15/4");
}

#[test]
fn involution_matrix_is_one_based() {
    let f = input(P112);
    let doc = ok_doc(&[
        "involution",
        "--input",
        f.path().to_str().unwrap(),
        "--index",
        "1",
    ]);
    let rows: Vec<Vec<String>> = doc["matrix"].as_array().unwrap().iter().map(strs).collect();
    assert_eq!(rows, [["-1", "0", "0"], ["2", "1", "0"], ["3", "0", "1"]]);
}

#[test]
fn reduce_reports_word() {
    let f = input(P112);
    let doc = ok_doc(&[
        "reduce",
        "--input",
        f.path().to_str().unwrap(),
        "--class",
        "-1,3,4",
    ]);
    assert_eq!(doc["word"], "(1)");
    assert_eq!(strs(&doc["nef_class"]), ["1", "1", "1"]);
}

#[test]
fn series_matches_closed_form() {
    let doc = ok_doc(&[
        "series", "--a", "-1", "--b", "2", "--k", "1", "--terms", "1000000",
    ]);
    let p = doc["partial_sum"].as_f64().unwrap();
    let c = doc["closed_form"].as_f64().unwrap();
    assert!((p - c).abs() < 1e-6);
    let mut args: Vec<f64> = doc["digamma_arguments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    args.sort_by(f64::total_cmp);
    let r = 33f64.sqrt() / 12.0;
    let mut want = [1.75 + r, 1.75 - r, 1.25 + r, 1.25 - r];
    want.sort_by(f64::total_cmp);
    for (a, w) in args.iter().zip(want) {
        assert!((a - w).abs() < 1e-12);
    }
}

#[test]
fn series_pole_is_a_domain_error() {
    let e = err_doc(&[
        "series", "--a", "5", "--b", "1", "--k", "1", "--terms", "10",
    ]);
    assert_eq!(e["code"], "pole_at_n");
    assert_eq!(e["context"]["subcommand"], "series");
}

#[test]
fn eigen_exact_mode() {
    let f = input(P333);
    let doc = ok_doc(&[
        "eigen",
        "--input",
        f.path().to_str().unwrap(),
        "--pair",
        "1",
        "2",
        "--exact",
    ]);
    assert_eq!(doc["lambda_exact"], "(47 + 21√5)/2");
    assert_eq!(
        strs(&doc["vector_exact"]),
        ["(5 - 3√5)/14", "(5 + 3√5)/14", "1"]
    );
    assert!(doc["self_pairing"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn limit_root_approaches_eigenvector() {
    let f = input(P333);
    let doc = ok_doc(&[
        "limit-root",
        "--input",
        f.path().to_str().unwrap(),
        "--pair",
        "2",
        "3",
    ]);
    assert!(doc["distance"].as_f64().unwrap() < 1e-9);
    let last = doc["self_pairings"]
        .as_array()
        .unwrap()
        .last()
        .unwrap()
        .as_f64()
        .unwrap();
    assert!(last.abs() < 1e-6);
}

#[test]
fn rays_need_full_j() {
    let f = input(P333);
    let doc = ok_doc(&["rays", "--input", f.path().to_str().unwrap()]);
    assert_eq!(doc["rays"].as_array().unwrap().len(), 6);
    let g = input(P112);
    let e = err_doc(&["rays", "--input", g.path().to_str().unwrap()]);
    assert_eq!(e["code"], "not_full_j");
}

#[test]
fn asymptotic_slope_of_a_face_class() {
    let f = input(P333);
    let doc = ok_doc(&[
        "vol-asymp",
        "--input",
        f.path().to_str().unwrap(),
        "--class",
        "0,0,1",
    ]);
    assert!((doc["slope"].as_f64().unwrap() - 3.0).abs() < 0.05);
    assert_eq!(doc["samples"].as_array().unwrap().len(), 13);
}

#[test]
fn bundle_volume_on_p1() {
    let f = input(P1);
    let path = f.path().to_str().unwrap();
    let doc = ok_doc(&[
        "pe-vol", "--input", path, "--class", "0", "--class", "1", "--exact",
    ]);
    assert_eq!(doc["volume"], "1");
    let doc = ok_doc(&["pe-vol", "--input", path, "--class", "0", "--class", "1"]);
    assert!((doc["volume"].as_f64().unwrap() - 1.0).abs() < 1e-3);
}

#[test]
fn domain_errors_are_structured() {
    let f = input(P112);
    let path = f.path().to_str().unwrap();
    let e = err_doc(&["involution", "--input", path, "--index", "3"]);
    assert_eq!(e["code"], "not_in_j");
    assert_eq!(e["context"]["index"], 3);
    let e = err_doc(&["involution", "--input", path, "--index", "0"]);
    assert_eq!(e["code"], "index_out_of_range");
    let e = err_doc(&["vol", "--input", path, "--class", "1,1"]);
    assert_eq!(e["code"], "dimension_mismatch");
    let e = err_doc(&["vol", "--input", path, "--class", "1,zz,1"]);
    assert_eq!(e["code"], "invalid_argument");
    let e = err_doc(&["vol", "--input", "/nonexistent/space.json", "--class", "1"]);
    assert_eq!(e["code"], "io_error");
    let bad = input(r#"{"factors":[1,1],"degrees":[[2,2,2]]}"#);
    let e = err_doc(&["check", "--input", bad.path().to_str().unwrap()]);
    assert_eq!(e["code"], "invalid_space");
    let junk = input("not json");
    let e = err_doc(&["check", "--input", junk.path().to_str().unwrap()]);
    assert_eq!(e["code"], "invalid_input");
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(cicy(&["frobnicate"]).code, 1);
    assert_eq!(cicy(&["vol", "--class", "1,1,1"]).code, 1);
    assert_eq!(cicy(&["eigen", "--input", "x.json", "--pair", "1"]).code, 1);
    let help = cicy(&["--help"]);
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("vol-asymp"));
    assert_eq!(cicy(&["--version"]).code, 0);
}

#[test]
fn binary_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_cicy");
    let f = input(P112);
    let out = Command::new(exe)
        .args([
            "vol",
            "--input",
            f.path().to_str().unwrap(),
            "--class",
            "1,1,1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["volume"], "30");
    let out = Command::new(exe)
        .args([
            "involution",
            "--input",
            f.path().to_str().unwrap(),
            "--index",
            "9",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(exe).arg("nope").output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
}
