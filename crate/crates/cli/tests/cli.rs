use std::path::Path;
use std::process::{Command, Output};

use nestmod_cli::document::InstanceDocument;
use serde_json::Value;

fn nestmod(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nestmod"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

/// A document for the given nest and real 0/1 unit generators (zero-based).
fn units_doc(nest: &[usize], units: &[(usize, usize)]) -> String {
    let n = *nest.last().unwrap();
    let gens: Vec<Vec<Vec<[f64; 2]>>> = units
        .iter()
        .map(|&(i, j)| {
            (0..n)
                .map(|r| (0..n).map(|c| [if (r, c) == (i, j) { 1.0 } else { 0.0 }, 0.0]).collect())
                .collect()
        })
        .collect();
    serde_json::json!({"nest": nest, "generators": gens}).to_string()
}

fn dim(report: &Value, key: &str) -> u64 {
    report["results"][0]["dimensions"][key].as_u64().unwrap()
}

#[test]
fn closures_of_small_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let e21 = write(dir.path(), "e21.json", &units_doc(&[0, 1, 2], &[(1, 0)]));
    let e12 = write(dir.path(), "e12.json", &units_doc(&[0, 1, 2], &[(0, 1)]));
    let empty = write(dir.path(), "empty.json", &units_doc(&[0, 1, 2], &[]));

    let out = nestmod(&["close-lie", "--input", &e21]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(dim(&json(&out), "closure"), 3);

    let out = nestmod(&["close-bimodule", "--input", &e12]);
    assert_eq!(dim(&json(&out), "closure"), 1);

    let out = nestmod(&["close-lie", "--input", &empty]);
    assert_eq!(dim(&json(&out), "closure"), 0);
}

#[test]
fn phi_of_a_single_corner() {
    let dir = tempfile::tempdir().unwrap();
    let e12 = write(dir.path(), "e12.json", &units_doc(&[0, 1, 2], &[(0, 1)]));
    let out = nestmod(&["phi", "--input", &e12]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"][0]["phi"], serde_json::json!([0, 0, 1]));
}

#[test]
fn example_constructions() {
    let out = nestmod(&["k-decompose", "--example"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(dim(&json(&out), "k"), 16);

    // the example module contains E11 = I − (E22 + … + E55), so it is
    // itself a bimodule
    let out = nestmod(&["largest-bimodule", "--example"]);
    assert_eq!(dim(&json(&out), "j"), 18);
}

#[test]
fn verify_example() {
    let out = nestmod(&["verify", "--example"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(dim(&r, "l"), 18);
    assert_eq!(dim(&r, "k"), 16);
    assert_eq!(dim(&r, "d_k"), 5);
    let info = &r["results"][0]["informational"];
    assert_eq!(info["j_not_in_k"], true);
    assert_eq!(info["l_not_in_k"], true);
    assert!(r["results"][0]["clauses"].as_object().unwrap().values().all(|v| v == true));
    assert!(r["results"][0].get("bases").is_none());
}

#[test]
fn verify_random_trials() {
    let out = nestmod(&["verify", "--random", "6", "3", "2", "42", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["summary"]["passed"], 50);
    assert_eq!(r["summary"]["failed"], 0);
    let seeds: Vec<u64> = r["results"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["rng_seed"].as_u64().unwrap())
        .collect();
    assert_eq!(seeds, (42..92).collect::<Vec<_>>());
}

#[test]
fn coarse_tolerance_breaks_a_clause() {
    let out = nestmod(&["verify", "--random", "4", "2", "2", "2", "3", "--tol", "0.9"]);
    assert_eq!(out.status.code(), Some(1));
    let r = json(&out);
    assert!(r["summary"]["failed"].as_u64().unwrap() >= 1);
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad_nest = write(dir.path(), "a.json", r#"{"nest":[0,3,2],"generators":[]}"#);
    let bad_json = write(dir.path(), "b.json", r#"{"nest":[0,1,2],"generators":"#);
    let bad_grid = write(dir.path(), "c.json", r#"{"nest":[0,1,2],"generators":[[[[1,0]]]]}"#);
    let unknown = write(dir.path(), "d.json", r#"{"nest":[0,2],"generators":[],"extra":1}"#);
    for f in [&bad_nest, &bad_json, &bad_grid, &unknown] {
        let out = nestmod(&["verify", "--input", f]);
        assert_eq!(out.status.code(), Some(2), "{f}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    assert_eq!(nestmod(&["verify"]).status.code(), Some(2));
    assert_eq!(nestmod(&["verify", "--example", "--input", &bad_nest]).status.code(), Some(2));
    assert_eq!(nestmod(&["verify", "--random", "3", "5", "1", "0", "1"]).status.code(), Some(2));
    assert_eq!(nestmod(&["verify", "--example", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(nestmod(&["verify", "--input", "/nonexistent/x.json"]).status.code(), Some(2));
}

#[test]
fn preconditions_exit_3_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let e21 = write(dir.path(), "e21.json", &units_doc(&[0, 1, 2], &[(1, 0)]));
    for cmd in ["k-decompose", "d-algebra"] {
        let out = nestmod(&[cmd, "--input", &e21]);
        assert_eq!(out.status.code(), Some(3), "{cmd}");
        let r = json(&out);
        assert!(r["results"][0]["precondition_failure"].is_string());
        assert_eq!(r["results"][0]["witnesses"].as_array().unwrap().len(), 1);
    }
    let e12 = write(dir.path(), "e12.json", &units_doc(&[0, 1, 2], &[(0, 1)]));
    let out = nestmod(&["d-algebra", "--input", &e12]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["results"][0]["bands"], serde_json::json!([]));
}

#[test]
fn reports_are_byte_identical() {
    let a = nestmod(&["verify", "--random", "5", "2", "3", "9", "4", "--bases"]);
    let b = nestmod(&["verify", "--random", "5", "2", "3", "9", "4", "--bases"]);
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.matches('\n').count(), 1);
    assert!(text.ends_with('\n'));
    assert!(json(&b)["results"][0]["bases"]["l"].is_array());
}

#[test]
fn generated_documents_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = nestmod(&["gen", "--random", "4", "2", "2", "7", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: InstanceDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc.generators.len(), 2);
    let path = write(dir.path(), "g.json", std::str::from_utf8(&out.stdout).unwrap());

    let from_file = json(&nestmod(&["verify", "--input", &path]));
    let from_seed = json(&nestmod(&["verify", "--random", "4", "2", "2", "7", "1"]));
    assert_eq!(from_file["results"][0]["dimensions"], from_seed["results"][0]["dimensions"]);
    assert_eq!(from_file["results"][0]["clauses"], from_seed["results"][0]["clauses"]);

    let many = nestmod(&["gen", "--random", "3", "1", "1", "0", "3"]);
    assert_eq!(String::from_utf8(many.stdout).unwrap().lines().count(), 3);
}

#[test]
fn output_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.json");
    let out = nestmod(&["phi", "--example", "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&target).unwrap()).unwrap();
    assert_eq!(r["command"], "phi");
    // rows 1–2 of the example span are full from column 1 and column 2 on
    assert_eq!(r["results"][0]["phi"], serde_json::json!([0, 1, 2, 5, 5, 5]));
}

#[test]
fn document_tolerance_is_used_unless_overridden() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "t.json", r#"{"nest":[0,2],"generators":[],"tolerance":1e-6}"#);
    let r = json(&nestmod(&["phi", "--input", &path]));
    assert_eq!(r["tolerance"], 1e-6);
    let r = json(&nestmod(&["phi", "--input", &path, "--tol", "1e-8"]));
    assert_eq!(r["tolerance"], 1e-8);
}
