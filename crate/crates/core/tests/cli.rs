//! End-to-end runs of the `extractorlab` binary.

use std::path::Path;
use std::process::{Command, Output};

use extractorlab::formats::{parse_family, parse_state, FamilyFile};
use extractorlab::report::{ExtractorReport, REPORT_SCHEMA};
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extractorlab")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let out = run(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let json: Value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{args:?}: {e}\n{text}"));
    (out.status.code().unwrap(), json)
}

/// Checks the subset of JSON Schema used by the report schema.
fn validate(schema: &Value, v: &Value, path: &str) -> Result<(), String> {
    if let Some(t) = schema.get("type").and_then(Value::as_str) {
        let ok = match t {
            "object" => v.is_object(),
            "array" => v.is_array(),
            "string" => v.is_string(),
            "boolean" => v.is_boolean(),
            "integer" => v.is_u64() || v.is_i64(),
            "number" => v.is_number(),
            _ => return Err(format!("{path}: unsupported type {t}")),
        };
        if !ok {
            return Err(format!("{path}: expected {t}, got {v}"));
        }
    }
    if let Some(c) = schema.get("const") {
        if c != v {
            return Err(format!("{path}: expected {c}"));
        }
    }
    if let Some(e) = schema.get("enum").and_then(Value::as_array) {
        if !e.contains(v) {
            return Err(format!("{path}: {v} not in enum"));
        }
    }
    if let Some(min) = schema.get("minimum").and_then(Value::as_f64) {
        if v.as_f64().is_some_and(|x| x < min) {
            return Err(format!("{path}: below minimum"));
        }
    }
    if let Some(obj) = v.as_object() {
        let props = schema.get("properties").and_then(Value::as_object);
        for req in schema.get("required").and_then(Value::as_array).into_iter().flatten() {
            if !obj.contains_key(req.as_str().unwrap()) {
                return Err(format!("{path}: missing {req}"));
            }
        }
        for (key, val) in obj {
            let sub = format!("{path}.{key}");
            match (props.and_then(|p| p.get(key)), schema.get("additionalProperties")) {
                (Some(s), _) => validate(s, val, &sub)?,
                (None, Some(Value::Bool(false))) => return Err(format!("{sub}: not allowed")),
                (None, Some(s)) if s.is_object() => validate(s, val, &sub)?,
                _ => {}
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), v.as_array()) {
        for (i, x) in arr.iter().enumerate() {
            validate(items, x, &format!("{path}[{i}]"))?;
        }
    }
    Ok(())
}

fn schema() -> Value {
    serde_json::from_str(REPORT_SCHEMA).unwrap()
}

#[test]
fn every_command_emits_a_schema_valid_report() {
    let schema = schema();
    let cases: &[&[&str]] = &[
        &["certify", "--family", "hash", "--n", "4", "--m", "2", "--k", "3"],
        &["certify", "--family", "clifford", "--n", "1", "--m", "1", "--k", "0"],
        &["verify", "--family", "hash", "--n", "3", "--m", "1", "--k", "2", "--trials", "5"],
        &["verify", "--family", "haar", "--n", "1", "--m", "1", "--t", "4", "--k", "-1", "--trials", "3"],
        &["witness", "prop2", "--family", "hash", "--n", "4", "--m", "2", "--k", "2"],
        &["witness", "prop4", "--family", "clifford", "--n", "1", "--m", "1", "--k", "0"],
        &["witness", "prop5", "--family", "clifford", "--n", "1", "--m", "1"],
        &["shortseed", "--n", "3", "--k", "2", "--m", "1", "--t", "4", "--trials", "3"],
        &["design-check", "--family", "clifford", "--n", "1"],
        &["entropy", "--kind", "cq", "--n", "1", "--r", "1", "--seed", "4"],
    ];
    for args in cases {
        let (code, json) = report(args);
        assert_eq!(code, 0, "{args:?}");
        validate(&schema, &json, "$").unwrap_or_else(|e| panic!("{args:?}: {e}"));
        let typed = ExtractorReport::from_json(&json.to_string()).unwrap();
        assert_eq!(typed.command, args[0]);
        assert_eq!(typed.violations, 0);
    }
}

#[test]
fn validator_rejects_stray_fields() {
    let (_, mut json) = report(&["certify", "--n", "3", "--m", "1"]);
    json["parameters"]["extra"] = Value::from(1);
    assert!(validate(&schema(), &json, "$").is_err());
}

#[test]
fn hash_certificate_matches_closed_form() {
    let (_, json) = report(&["certify", "--family", "hash", "--n", "4", "--m", "2"]);
    let lambda = json["certificate"]["lambda1_diff"].as_f64().unwrap();
    assert!((lambda - 0.75 / 16.0).abs() < 1e-12);
    assert_eq!(json["parameters"]["seeds"], 16);
}

#[test]
fn reports_are_reproducible_and_seed_dependent() {
    let args = ["verify", "--family", "hash", "--n", "3", "--m", "1", "--k", "1.5", "--trials", "6", "--seed", "3"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let mut other = args;
    other[11] = "4";
    assert_ne!(run(&other).stdout, a.stdout);
}

#[test]
fn timing_adds_wall_time() {
    let (_, json) = report(&["--timing", "certify", "--n", "3", "--m", "1"]);
    assert!(json["wall_time"].as_f64().unwrap() >= 0.0);
    validate(&schema(), &json, "$").unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["certify", "--family", "nope", "--n", "3", "--m", "1"]).status.code(), Some(2));
    assert_eq!(run(&["certify", "--n", "3", "--m", "5"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["certify", "--family", "hash", "--n", "11", "--m", "1"]).status.code(), Some(3));
    assert_eq!(run(&["entropy", "--kind", "cq", "--n", "1", "--r", "1", "--k", "1.5"]).status.code(), Some(4));
    // a Haar family with a handful of members is far from a 2-design
    assert_eq!(run(&["design-check", "--family", "haar", "--n", "1", "--m", "1", "--t", "4"]).status.code(), Some(1));
}

#[test]
fn exported_family_round_trips_through_file_input() {
    let dir = tempfile::tempdir().unwrap();
    for (family, n) in [("perm", "3"), ("haar", "2")] {
        let path = dir.path().join(format!("{family}.txt"));
        let p = path.to_str().unwrap();
        let (code, first) = report(&["certify", "--family", family, "--n", n, "--m", "1", "--t", "3", "--out", p]);
        assert_eq!(code, 0);
        let parsed = parse_family(&std::fs::read_to_string(&path).unwrap()).unwrap();
        match (family, parsed) {
            ("perm", FamilyFile::Classical(f)) => assert_eq!(f.seeds(), 56),
            ("haar", FamilyFile::Unitary(f)) => assert_eq!(f.seeds(), 3),
            _ => panic!("{family}: wrong file kind"),
        }
        let from_file = format!("file:{p}");
        let (_, second) = report(&["certify", "--family", &from_file]);
        let a = first["certificate"]["lambda1_diff"].as_f64().unwrap();
        let b = second["certificate"]["lambda1_diff"].as_f64().unwrap();
        assert!((a - b).abs() <= 1e-12 * a.abs().max(1e-12), "{family}: {a} vs {b}");
    }
}

#[test]
fn state_output_feeds_back_into_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("state.txt");
    let p = path.to_str().unwrap();
    let (_, first) = report(&["witness", "prop5", "--family", "clifford", "--n", "2", "--m", "1", "--out", p]);
    let state = parse_state(&std::fs::read_to_string(Path::new(p)).unwrap()).unwrap();
    assert_eq!(state.dim_n(), 4);
    let (code, second) = report(&["entropy", "--state", p]);
    assert_eq!(code, 0);
    let h = second["values"]["hmin"].as_f64().unwrap();
    assert!((h - 1.0).abs() < 1e-6, "H_min {h}");
    assert!((first["values"]["single_error"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn witness_values_stay_below_the_certificate() {
    for k in ["1", "2", "3"] {
        let (code, json) = report(&["witness", "prop2", "--family", "hash", "--n", "4", "--m", "2", "--k", k]);
        assert_eq!(code, 0);
        let lambda = json["values"]["lambda1_diff"].as_f64().unwrap();
        for key in ["lower_bound", "rayleigh"] {
            assert!(json["values"][key].as_f64().unwrap() <= lambda + 1e-9, "k={k} {key}");
        }
    }
}
