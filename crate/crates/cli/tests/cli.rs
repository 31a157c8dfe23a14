use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vicsek"))
        .args(args)
        .env_remove("VICSEK_MAX_LEVEL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn assert_schema(name: &str, value: &Value) {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(name);
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();
    let errors: Vec<String> = validator.iter_errors(value).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn spectrum_both_matches_dense() {
    let o = run(&["spectrum", "--d", "2", "--n", "2", "--m", "1", "--mode", "neumann", "--method", "both"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_schema("spectrum.schema.json", &v);
    let entries = v["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 4);
    let exact: Vec<&str> = entries.iter().map(|e| e["exact"].as_str().unwrap()).collect();
    assert_eq!(exact, ["0", "1/6", "5/6", "4/3"]);
    assert_eq!(v["comparison"]["matches"], true);
    assert_eq!(v["comparison"]["multiplicitiesEqual"], true);
    assert_eq!(v["totalMultiplicity"], 16);
}

#[test]
fn empty_dirichlet_spectrum() {
    let o = run(&["spectrum", "--d", "2", "--n", "2", "--m", "0", "--mode", "dirichlet"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_schema("spectrum.schema.json", &v);
    assert!(v["entries"].as_array().unwrap().is_empty());
}

#[test]
fn invalid_dimension_is_a_usage_error() {
    let o = run(&["spectrum", "--d", "1", "--n", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("d >= 2"), "{}", stderr(&o));
    assert_eq!(run(&["spectrum", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["spectrum", "--mode", "robin"]).status.code(), Some(1));
}

#[test]
fn csv_header_and_rows() {
    let o = run(&["spectrum", "--m", "1", "--mode", "dirichlet", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "value,multiplicity,seed,word");
    assert_eq!(lines.len(), 5);
    assert_eq!(lines[2], "0.5,3,beta1,");
    assert_eq!(lines[4], "1.33333333333333,7,top,");
}

#[test]
fn output_is_deterministic_across_thread_counts() {
    let args = ["spectrum", "--d", "2", "--n", "3", "--m", "2", "--mode", "dirichlet"];
    let a = run(&args);
    let mut with_threads = args.to_vec();
    with_threads.extend(["--threads", "1"]);
    let b = run(&with_threads);
    let mut seq = args.to_vec();
    seq.push("--sequential");
    let c = run(&seq);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn help_lists_defaults() {
    let o = run(&["spectrum", "--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("[default: 0.000001]"), "{text}");
    assert!(text.contains("[default: 0.00000001]"), "{text}");
    let o = run(&["--help"]);
    assert!(stdout(&o).contains("VICSEK_MAX_LEVEL"));
}

#[test]
fn capacity_policy_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_vicsek"))
        .args(["graph", "--m", "3"])
        .env("VICSEK_MAX_LEVEL", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("capacity"));
}

#[test]
fn graph_summary() {
    let o = run(&["graph", "--d", "3", "--n", "2", "--m", "1", "--full"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_schema("graph.schema.json", &v);
    assert_eq!(v["vertices"].as_u64().unwrap().to_string(), v["expectedVertices"].as_str().unwrap());
    assert_eq!(v["edges"].as_u64().unwrap().to_string(), v["expectedEdges"].as_str().unwrap());
    assert_eq!(v["connected"], true);
    let degrees: Vec<&String> = v["degreeCounts"].as_object().unwrap().keys().collect();
    assert_eq!(degrees, ["14", "7"]);
}

#[test]
fn extend_roundtrip() {
    let o = run(&["extend", "--d", "2", "--n", "3", "--m", "1", "--index", "3", "--branch", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v = json(&o);
    assert_schema("extend.schema.json", &v);
    assert!(v["extensionResidual"].as_f64().unwrap() <= 1e-8);
    assert!(v["restrictionResidual"].as_f64().unwrap() <= 1e-7);
}

#[test]
fn extend_at_forbidden_value_fails_numerically() {
    // the top eigenvalue 4/3 has preimage 1/2, a root of A
    let o = run(&["extend", "--d", "2", "--n", "2", "--m", "0", "--index", "3", "--branch", "1"]);
    assert_eq!(o.status.code(), Some(3), "{}", stdout(&o));
    assert!(stderr(&o).contains("forbidden"));
}

#[test]
fn verify_identities_passes() {
    let o = run(&["verify", "--suite", "identities", "--d", "2", "--n", "3", "--samples", "2000"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.contains("PASS (2,3) R = lambda A"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn verify_lattice_json() {
    let o = run(&["verify", "--suite", "lattice", "--pairs", "200", "--horizon", "8", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_schema("verify.schema.json", &v);
    let checks = v["suites"][0]["checks"].as_array().unwrap();
    assert!(checks[0]["detail"].as_str().unwrap().starts_with("200/200 agree"));
}

#[test]
fn verify_reports_failure_with_exit_four() {
    let o = run(&["verify", "--suite", "eigenmaps", "--d", "2", "--n", "2", "--residual-tol", "0"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn lattice_iso_example() {
    let o = run(&["lattice", "iso", "--omega", "|0", "--omega-prime", "(1,1)|0", "--bound", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_schema("iso.schema.json", &v);
    assert_eq!(v["isomorphic"], true);
    assert_eq!(v["witnessM"], 2);
    assert_eq!(v["method"], "thm56");
    let o = run(&[
        "lattice", "iso", "--d", "2", "--n", "3", "--omega", "|(1,1)", "--omega-prime", "|(1,2)", "--method", "both",
    ]);
    let v = json(&o);
    assert_schema("iso.schema.json", &v);
    assert_eq!(v["isomorphic"], false);
    assert_eq!(v["witnessM"], Value::Null);
}

#[test]
fn lattice_iso_inconclusive_is_distinct() {
    let o = run(&[
        "lattice", "iso", "--d", "2", "--n", "3", "--omega", "(1,1)|(2,1)", "--omega-prime", "(1,2)|(2,1)", "--bound", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_schema("iso.schema.json", &v);
    assert_eq!(v["isomorphic"], Value::Null);
    assert_eq!(v["inconclusive"]["minimalWitness"], 2);
}

#[test]
fn lattice_parse_error_reports_position() {
    let o = run(&["lattice", "iso", "--omega", "(5,1)|0", "--omega-prime", "|0"]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("i out of range 1..4") && err.contains("position 2"), "{err}");
}

#[test]
fn lattice_gamma_matrix() {
    let o = run(&["lattice", "gamma", "--omega", "|(1,1)", "--M", "0", "--h", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_schema("gamma.schema.json", &v);
    let d = v["distances"].as_array().unwrap();
    assert_eq!(d.len(), 5);
    for k in 0..4 {
        assert_eq!(d[k][k + 1], 2 * 3u64.pow(k as u32));
        assert_eq!(d[k][k], 0);
    }
}

#[test]
fn lattice_tree_export() {
    let o = run(&["lattice", "tree", "--omega", "|0", "--h", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_schema("tree.schema.json", &v);
    assert_eq!(v["vertexCount"], 21);
    assert_eq!(v["edgeCount"], 20);
    assert_eq!(v["isTree"], true);
    let o = run(&["lattice", "tree", "--omega", "|0", "--h", "1", "--format", "csv"]);
    assert_eq!(stdout(&o).lines().count(), 21);
}
