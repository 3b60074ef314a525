use std::path::PathBuf;
use std::process::Command;

use crsing::cli::{run, EXIT_FINDING, EXIT_OK, EXIT_USAGE};
use serde_json::Value;

struct Out {
    code: i32,
    stdout: String,
    stderr: String,
}

fn call(args: &[&str]) -> Out {
    let (mut o, mut e) = (Vec::new(), Vec::new());
    let argv = std::iter::once("crsing").chain(args.iter().copied());
    let code = run(argv, &mut o, &mut e);
    Out {
        code,
        stdout: String::from_utf8(o).unwrap(),
        stderr: String::from_utf8(e).unwrap(),
    }
}

fn schema_for(def: &str) -> jsonschema::Validator {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/schema/reports.schema.json");
    let mut doc: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    doc["$ref"] = Value::String(format!("#/$defs/{def}"));
    jsonschema::validator_for(&doc).unwrap()
}

fn check(def: &str, text: &str) -> Value {
    let v: Value = serde_json::from_str(text).unwrap();
    let errors: Vec<String> = schema_for(def).iter_errors(&v).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{def}: {errors:?}\n{text}");
    v
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("crsing-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn example(name: &str, params: &[&str]) -> PathBuf {
    let path = tmp(&format!("{name}-{}.json", params.join("_").replace(['/', '='], "-")));
    let mut args = vec!["example", name, "--out", path.to_str().unwrap()];
    for p in params {
        args.extend(["--param", p]);
    }
    let out = call(&args);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    check("written", &out.stdout);
    path
}

#[test]
fn det_s_one() {
    let out = call(&["det", "--kind", "S", "--mhat", "1"]);
    assert_eq!(out.code, EXIT_OK);
    let v = check("det", &out.stdout);
    assert_eq!(v["det"], "2");
    let out = call(&["det", "--kind", "Rplus", "--mhat", "2", "--xi", "1"]);
    assert_eq!(out.code, EXIT_FINDING);
    let v = check("det", &out.stdout);
    assert_eq!(v["factored"]["c"], "-192");
    assert_eq!(v["at_xi"]["nonsingular"], false);
}

#[test]
fn hy2_flatten_is_obstructed_at_four() {
    let path = example("hy2_obstruction", &[]);
    let out = call(&["flatten", path.to_str().unwrap(), "--to", "4"]);
    assert_eq!(out.code, EXIT_FINDING);
    let v = check("flatten", &out.stdout);
    assert_eq!(v["outcome"], "Obstructed");
    assert_eq!(v["order"], 4);
}

#[test]
fn cubic_flattens_and_emits_transform() {
    let path = example("cubic_nonminimal", &["lambda1=0", "lambda2=1/4", "order=10"]);
    let transform = tmp("transform.json");
    let out = call(&[
        "flatten",
        path.to_str().unwrap(),
        "--to",
        "6",
        "--emit-transform",
        transform.to_str().unwrap(),
    ]);
    assert_eq!(out.code, EXIT_OK, "{}", out.stderr);
    let v = check("flatten", &out.stdout);
    assert_eq!(v["outcome"], "Flattened");
    assert_eq!(v["permutation"], serde_json::json!([2, 1]));
    let t = check("transform", &std::fs::read_to_string(transform).unwrap());
    assert_eq!(t["corrections"], v["corrections"]);
    assert_eq!(t["manifold"]["lambda"], serde_json::json!(["1/4", "0"]));

    let inv = call(&["invariants", path.to_str().unwrap()]);
    assert_eq!(inv.code, EXIT_OK);
    let v = check("invariants", &inv.stdout);
    assert_eq!(v["smallest_nonparabolic"], 1);
    let nm = call(&["nonminimal", path.to_str().unwrap(), "--order", "6"]);
    assert_eq!(nm.code, EXIT_OK);
    assert_eq!(check("nonminimal", &nm.stdout)["nonminimal"], true);
}

#[test]
fn hy2_is_not_nonminimal() {
    let path = example("hy2_obstruction", &["order=10"]);
    let out = call(&["nonminimal", path.to_str().unwrap(), "--order", "7"]);
    assert_eq!(out.code, EXIT_FINDING);
    let v = check("nonminimal", &out.stdout);
    assert_eq!(v["witness"]["residual"], "III");
}

#[test]
fn rigidity_reindexes_and_reports() {
    let out = call(&["rigidity", "--n", "2", "--lambda", "1/8", "--lambda", "1/4", "--degree", "4"]);
    assert_eq!(out.code, EXIT_OK);
    let v = check("rigidity", &out.stdout);
    assert_eq!(v["dimension"], 0);
    assert_eq!(v["lambda"], serde_json::json!(["1/4", "1/8"]));
    assert_eq!(v["permutation"], serde_json::json!([2, 1]));
    let bad = call(&["rigidity", "--n", "3", "--lambda", "0", "--degree", "3"]);
    assert_eq!(bad.code, EXIT_USAGE);
    assert!(bad.stderr.starts_with("error:"));
}

#[test]
fn example_to_stdout_is_a_manifest() {
    let out = call(&["example", "appendix_random", "--param", "seed=4"]);
    assert_eq!(out.code, EXIT_OK);
    check("manifest", &out.stdout);
}

#[test]
fn selftest_passes() {
    let out = call(&["selftest", "--max-degree", "4"]);
    let v = check("selftest", &out.stdout);
    assert_eq!(v["passed"], true, "{}", out.stdout);
    assert_eq!(out.code, EXIT_OK);
}

#[test]
fn usage_and_input_errors_exit_one() {
    assert_eq!(call(&["frobnicate"]).code, EXIT_USAGE);
    assert_eq!(call(&["det", "--kind", "Q", "--mhat", "1"]).code, EXIT_USAGE);
    assert_eq!(call(&["det", "--kind", "Rplus", "--mhat", "1"]).code, EXIT_USAGE);
    assert_eq!(call(&["invariants", "/nonexistent/m.json"]).code, EXIT_USAGE);
    let garbled = tmp("garbled.json");
    std::fs::write(&garbled, "{\"n\": 2}").unwrap();
    let out = call(&["invariants", garbled.to_str().unwrap()]);
    assert_eq!(out.code, EXIT_USAGE);
    assert!(out.stdout.is_empty());
    let help = call(&["--help"]);
    assert_eq!(help.code, EXIT_OK);
    assert!(help.stdout.contains("rigidity"));
}

#[test]
fn human_rendering() {
    let out = call(&["det", "--kind", "N", "--mhat", "2", "--human"]);
    assert_eq!(out.code, EXIT_OK);
    assert!(out.stdout.contains("det: 1280*xi^2"));
    assert!(serde_json::from_str::<Value>(&out.stdout).is_err());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let path = example("appendix_random", &["seed=9", "m=4", "order=6"]);
    let p = path.to_str().unwrap();
    for args in [
        vec!["flatten", p, "--to", "5"],
        vec!["invariants", p],
        vec!["rigidity", "--n", "2", "--lambda", "0", "--lambda", "1/3", "--degree", "4"],
        vec!["det", "--kind", "T", "--mhat", "3", "--xi", "-1/2"],
    ] {
        let a = call(&args);
        let b = call(&args);
        assert_eq!(a.stdout, b.stdout);
        assert_eq!(a.code, b.code);
    }
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_crsing");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let ok = status(&["det", "--kind", "S", "--mhat", "1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("\"det\": \"2\""));
    let path = example("hy2_obstruction", &["order=6"]);
    let finding = status(&["flatten", path.to_str().unwrap(), "--to", "4"]);
    assert_eq!(finding.status.code(), Some(2));
    let usage = status(&["det", "--mhat", "1"]);
    assert_eq!(usage.status.code(), Some(1));
    assert!(!usage.stderr.is_empty());
}

#[test]
fn schema_rejects_malformed_reports() {
    let det = schema_for("det");
    assert!(!det.is_valid(&serde_json::json!({"kind": "S", "mhat": 1, "det": 2, "factored": {}})));
    assert!(!det.is_valid(&serde_json::json!({
        "kind": "S", "mhat": 1, "det": "2",
        "factored": {"c": "2", "xi_exp": 0, "one_minus_xi_exp": 0}, "extra": true
    })));
    let flat = schema_for("flatten");
    assert!(!flat.is_valid(&serde_json::json!({"outcome": "Obstructed", "order": 4, "corrections": []})));
}
