use std::path::{Path, PathBuf};
use std::process::Command;

use gts_core::cli::{run, Output, EXIT_EXHAUSTED, EXIT_INPUT, EXIT_NEGATIVE, EXIT_OK};
use jsonschema::JSONSchema;
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn gts(file: &str, args: &[&str]) -> Output {
    let path = fixture(file);
    let mut argv = vec!["gts", "-f", path.as_str()];
    argv.extend_from_slice(args);
    run(argv)
}

fn schema(name: &str) -> JSONSchema {
    let path = root().join("docs/schemas").join(format!("{name}.json"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap()
}

/// Runs with `--json`, checks the exit code, and validates the output
/// against the command's schema (or the error schema).
fn json(file: &str, args: &[&str], code: i32) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = gts(file, &all);
    assert_eq!(out.code, code, "{args:?}\n{}{}", out.stdout, out.stderr);
    let v: Value = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    assert_eq!(v["exit"], code);
    let name = if v.get("error").is_some() {
        "error"
    } else {
        v["command"].as_str().unwrap()
    };
    let s = schema(name);
    if let Err(errors) = s.validate(&v) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{name} output violates its schema: {msgs:?}\n{v}");
    }
    v
}

#[test]
fn every_schema_is_valid_json_schema() {
    let dir = root().join("docs/schemas");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        JSONSchema::compile(&serde_json::from_str(&text).unwrap()).unwrap();
        count += 1;
    }
    assert_eq!(count, 16);
}

#[test]
fn graph_commands() {
    let v = json("example.gts", &["normalize", "G1"], EXIT_OK);
    assert_eq!(v["components"].as_array().unwrap().len(), 2);
    assert_eq!(json("example.gts", &["congr", "G1", "G1"], EXIT_OK)["congruent"], true);
    assert_eq!(
        json("example.gts", &["congr", "G0", "G1"], EXIT_NEGATIVE)["congruent"],
        false
    );
    assert_eq!(json("example.gts", &["heat", "G1", "G0"], EXIT_NEGATIVE)["heating"], false);
    let v = json("example.gts", &["match", "p", "G0"], EXIT_OK);
    assert_eq!(v["matches"].as_array().unwrap().len(), 9);
    let v = json("example.gts", &["apply", "p", "G0", "--match", "1"], EXIT_OK);
    assert!(v["result"].as_str().unwrap().contains("b(x,y)"));
    json("example.gts", &["apply", "p", "G0", "--match", "9"], EXIT_INPUT);
}

#[test]
fn reachability_outcomes() {
    let v = json("example.gts", &["reach", "G1"], EXIT_OK);
    assert_eq!((v["outcome"].as_str(), v["steps"].as_u64()), (Some("found"), Some(1)));
    let v = json("example.gts", &["reach", "G3", "--max-steps", "1"], EXIT_NEGATIVE);
    assert_eq!(v["outcome"], "not_found");
    let v = json(
        "example.gts",
        &["reach", "G3", "--max-steps", "5", "--cap", "2"],
        EXIT_EXHAUSTED,
    );
    assert_eq!(v["outcome"], "exhausted");
    json("example.gts", &["reach", "G1", "--exact", "p"], EXIT_OK);
    json("example.gts", &["reach", "G1", "--exact", "p,p"], EXIT_NEGATIVE);
}

#[test]
fn encoding_commands() {
    let v = json("example.gts", &["encode", "G1"], EXIT_OK);
    assert_eq!(v["type"], "ex x y z:A. b(z,x) * b(x,y)");
    assert_eq!(
        json("example.gts", &["encode-rule", "p"], EXIT_OK)["formula"],
        "all x1 x2:A. 1 -o b(x1,x2)"
    );
    let v = json("example.gts", &["encode-gts"], EXIT_OK);
    assert_eq!(v["rules"][0]["name"], "rule_p");
}

#[test]
fn logic_commands() {
    assert_eq!(json("logic.gts", &["check", "exchange"], EXIT_OK)["valid"], true);
    let v = json("logic.gts", &["check", "bad_witness"], EXIT_NEGATIVE);
    assert_eq!(v["class"], "witness_reuse");
    json("logic.gts", &["check", "refuse_split"], EXIT_INPUT);
    let v = json("logic.gts", &["search", "dir_d1", "--depth", "10"], EXIT_OK);
    assert_eq!(v["found"], true);
    let v = json("logic.gts", &["search", "refuse_identify"], EXIT_NEGATIVE);
    assert_eq!((v["found"].as_bool(), v["depth"].as_u64()), (Some(false), Some(12)));
    let eq = json("logic.gts", &["equiv", "ex x y:A. b(x,y)", "ex y x:A. b(x,y)"], EXIT_OK);
    assert_eq!(eq["equivalent"], true);
    json(
        "logic.gts",
        &["equiv", "ex x:A. b(x,x)", "ex x y:A. b(x,y)"],
        EXIT_NEGATIVE,
    );
}

#[test]
fn certificates_are_rechecked() {
    let v = json("example.gts", &["certify-step", "p", "G0", "--match", "1"], EXIT_OK);
    assert!(v["certificate"]["term"].as_str().unwrap().contains("rule_p"));
    for style in ["nonlinear", "linear", "at-least"] {
        let v = json("example.gts", &["certify-trace", "G1", "--style", style], EXIT_OK);
        assert_eq!(v["certificate"]["trace"].as_array().unwrap().len(), 1);
        let dir = std::env::temp_dir().join(format!("gts-cli-{}-{style}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cert.json");
        std::fs::write(&path, v.to_string()).unwrap();
        let p = path.to_string_lossy().into_owned();
        assert_eq!(json("example.gts", &["check", "--cert", &p], EXIT_OK)["valid"], true);

        let mut bad = v.clone();
        bad["certificate"]["type"] = Value::from("ex x y z:A. b(z,x) * b(y,x)");
        std::fs::write(&path, bad.to_string()).unwrap();
        assert_eq!(
            json("example.gts", &["check", "--cert", &p], EXIT_NEGATIVE)["valid"],
            false
        );
        std::fs::remove_dir_all(&dir).unwrap();
    }
    json(
        "example.gts",
        &["certify-trace", "G3", "--style", "linear", "--instances", "p=1"],
        EXIT_NEGATIVE,
    );
    json(
        "example.gts",
        &["certify-trace", "G1", "--style", "linear", "--instances", "p=2"],
        EXIT_NEGATIVE,
    );
    let v = json("example.gts", &["constraint", "alpha", "--trace", "G1"], EXIT_OK);
    assert!(v["certificate"]["type"].as_str().unwrap().ends_with("bot"));
    assert!(json("example.gts", &["constraint", "alpha", "--trace", "G0"], EXIT_NEGATIVE)["certificate"].is_null());
}

#[test]
fn input_errors() {
    json("example.gts", &["normalize", "nope"], EXIT_INPUT);
    json("missing.gts", &["normalize", "G0"], EXIT_INPUT);
    let out = gts("example.gts", &["frobnicate"]);
    assert_eq!(out.code, EXIT_INPUT);
    let out = gts("example.gts", &["normalize", "nope"]);
    assert!(out.stderr.starts_with("error: "), "{}", out.stderr);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_gts");
    let status = |args: &[&str]| {
        Command::new(bin)
            .args(["-f", &fixture("example.gts")])
            .args(args)
            .output()
            .unwrap()
    };
    let ok = status(&["reach", "G1"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout).contains("reachable in 1 step"));
    assert_eq!(status(&["reach", "G3", "--max-steps", "1"]).status.code(), Some(1));
    assert_eq!(status(&["reach", "nope"]).status.code(), Some(2));
    assert_eq!(
        status(&["reach", "G3", "--max-steps", "5", "--cap", "2"]).status.code(),
        Some(3)
    );
}
