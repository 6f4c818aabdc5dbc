use std::io::Write;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn maassp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maassp")).args(args).output().expect("binary runs")
}

fn json_out(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn temp_json(v: &Value) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{v}").unwrap();
    f
}

#[test]
fn splitting_suite_passes() {
    let out = maassp(&["verify", "--suite", "splitting"]);
    assert!(out.status.success());
    let r = json_out(&out);
    assert_eq!(r["passed"], json!(true));
    assert_eq!(r["total"], json!(101));
}

#[test]
fn delta_of_one_at_weight_two() {
    let f = temp_json(&json!({"terms": [{"z": 0, "zs": 0, "u": 0, "L": 0, "coeff": "1"}]}));
    let out = maassp(&["maass", "apply", "--weight", "2", "--iterate", "1", "--form", f.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json_out(&out), json!({"terms": [{"z": 0, "zs": 0, "u": 1, "L": 0, "coeff": "2"}]}));
}

#[test]
fn malformed_input_exits_two_with_path() {
    let f = temp_json(&json!({"terms": [{"z": 0, "zs": 0, "u": 0, "L": 0, "coeff": "1"}, {"z": "a", "coeff": "1"}]}));
    let out = maassp(&["maass", "apply", "--weight", "2", "--form", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("form.terms[1].z"), "{err}");

    let mut bad = tempfile::NamedTempFile::new().unwrap();
    write!(bad, "{{\"terms\": [\n  1,\n").unwrap();
    let out = maassp(&["decompose", "--weight", "2", "--form", bad.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn failing_suite_exits_one() {
    let out = maassp(&["verify", "--suite", "quaternion"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json_out(&out);
    let failed: Vec<&str> = r["assertions"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|a| a["passed"] == json!(false))
        .map(|a| a["id"].as_str().unwrap())
        .collect();
    assert_eq!(failed, ["quaternion/gram-symplectic", "quaternion/p0-search-3-14"]);
}

#[test]
fn output_is_deterministic() {
    let a = maassp(&["verify", "--suite", "cm", "--seed", "7"]);
    let b = maassp(&["verify", "--suite", "cm", "--seed", "7", "--sequential"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sol.json");
    let out = maassp(&["coleman", "solve", "--n", "2", "--f", "[\"0\", \"12\"]", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["c0"], json!(["0", "0", "0", "0", "1"]));
}

#[test]
fn coleman_verify_suites() {
    for suite in ["theta", "recurrence"] {
        let out = maassp(&["coleman", "verify", "--suite", suite, "--n", "4"]);
        assert!(out.status.success(), "{suite}");
        assert_eq!(json_out(&out)["rows"].as_array().unwrap().len(), 3);
    }
    let out = maassp(&["coleman", "solve", "--n", "3", "--f", "[\"1\"]"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn theta_of_weighted_function() {
    let out = maassp(&["theta", "--weight", "2", "--form", "{\"terms\": [{\"z\": 0, \"coeff\": \"1\"}]}"]);
    assert!(out.status.success());
    let s = json_out(&out);
    assert_eq!(s["n"], json!(4));
    assert_eq!(s["tp_pow"], json!(-1));
}

#[test]
fn decompose_reports_parts() {
    // δ_2(z) = 1 + 2uz
    let out = maassp(&["decompose", "--weight", "2", "--form", "{\"parts\": [[\"1\"], [\"0\", \"2\"]]}"]);
    assert!(out.status.success());
    let parts = json_out(&out)["parts"].clone();
    assert_eq!(parts[1], json!({"j": 1, "weight": 2, "h": ["0", "1"]}));
    assert_eq!(parts[0], json!({"j": 0, "weight": 4, "h": []}));
}

#[test]
fn tree_commands() {
    let out = maassp(&["tree", "neighbors", "--p", "3", "--vertex", "{\"m\": 0, \"b\": \"0\"}"]);
    assert_eq!(json_out(&out)["neighbors"].as_array().unwrap().len(), 4);
    let out = maassp(&["tree", "path", "--p", "3", "--from", "{\"m\": 0, \"b\": \"0\"}", "--to", "{\"m\": 2, \"b\": \"4\"}"]);
    assert_eq!(json_out(&out)["distance"], json!(2));
    let out = maassp(&["tree", "reduce", "--point", "{\"v\": 0, \"a\": \"7\", \"b\": \"25\"}"]);
    assert_eq!(json_out(&out)["vertex"], json!({"m": 2, "b": "7"}));
    let out = maassp(&["tree", "neighbors", "--vertex", "{\"m\": 0, \"b\": \"1/2\"}"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn cocycle_commands() {
    let f = "{\"poly\": [], \"poles\": [{\"q\": \"0\", \"k\": 1, \"c\": \"1\"}]}";
    let out = maassp(&["cocycle", "residues", "--p", "3", "--function", f, "--n", "0", "--radius", "1"]);
    assert!(out.status.success());
    let c = temp_json(&json_out(&out));
    let out = maassp(&["cocycle", "check", "--p", "3", "--cochain", c.path().to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(json_out(&out)["harmonic"], json!(true));
}

#[test]
fn cm_commands() {
    let out = maassp(&["cm", "fixed-point", "--matrix", "0,2,1,0"]);
    assert!(out.status.success());
    assert_eq!(json_out(&out)["residual"]["v"], Value::Null);
    let out = maassp(&["cm", "aj-table", "--n", "2", "--f", "[\"0\", \"12\"]", "--matrix", "0,2,1,0"]);
    assert!(out.status.success());
    let out = maassp(&["cm", "eval", "--weight", "0", "--iterate", "1", "--form", "{\"terms\": [{\"z\": 1, \"coeff\": \"1\"}]}", "--matrix", "0,2,1,0"]);
    assert_eq!(json_out(&out)["value"], json!({"v": 0, "a": "1", "b": "0"}));
    let out = maassp(&["cm", "fixed-point", "--matrix", "0,4,1,0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn quat_report() {
    let out = maassp(&["quat", "--p", "3", "--nminus", "2"]);
    assert!(out.status.success());
    let r = json_out(&out);
    assert_eq!(r["p0"], json!(2));
    assert_eq!(r["a"], Value::Null);
}
