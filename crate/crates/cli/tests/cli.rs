use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn nilcat(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nilcat"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    serde_json::from_str(&stdout(&nilcat(args))).unwrap()
}

/// Asserts that the top-level `keys` appear in this order in the raw text.
fn assert_key_order(text: &str, keys: &[&str]) {
    let pos: Vec<usize> = keys
        .iter()
        .map(|k| {
            text.find(&format!("\n  \"{k}\":"))
                .unwrap_or_else(|| panic!("missing {k}"))
        })
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]), "{keys:?} in {text}");
}

fn schema(name: &str) -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(format!("{name}.schema.json"));
    let raw: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::validator_for(&raw).unwrap()
}

fn assert_valid(name: &str, doc: &Value) {
    let v = schema(name);
    let errors: Vec<String> = v.iter_errors(doc).map(|e| e.to_string()).collect();
    assert!(errors.is_empty(), "{name}: {errors:?}");
}

#[test]
fn profile_csv_contract() {
    let text = stdout(&nilcat(&["profile", "--a", "1"]));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,f,f_t,s,gamma"));
    assert!(text.lines().any(|l| l == "0,1,0,0,0"));
    // default span 40/a at spacing 0.1
    assert_eq!(text.lines().count(), 1 + 801);
    for line in text.lines().skip(1) {
        assert_eq!(line.split(',').count(), 5);
    }
}

#[test]
fn profile_json_contract() {
    let text = stdout(&nilcat(&["profile", "--a", "2", "--format", "json"]));
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc.as_object().unwrap().len(), 2);
    assert_key_order(&text, &["a", "rows"]);
    assert_valid("profile", &doc);
}

#[test]
fn negative_a_is_a_usage_error() {
    let out = nilcat(&["profile", "--a", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("a > 0"));
}

#[test]
fn other_usage_errors() {
    for args in [
        &["index", "--a", "1", "--format", "csv"][..],
        &["profile", "--a", "1", "--step", "0"],
        &["stability", "--a", "1", "--t1", "-1"],
        &["index", "--a", "1", "--ode-rel", "0"],
        &["index", "--a", "1", "--n", "2"],
        &["index"],
        &["index", "--a", "1", "--a-grid", "1,2"],
        &["bogus"],
    ] {
        assert_eq!(nilcat(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn index_at_unit_neck() {
    let text = stdout(&nilcat(&["index", "--a", "1"]));
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(doc["computed"], 3);
    assert_eq!(doc["lower"], 3);
    assert_eq!(doc["upper"], 3);
    assert_key_order(&text, &["computed", "lower", "upper"]);
    assert_valid("index", &doc);
}

#[test]
fn highdim_documents() {
    let two = json(&["highdim", "--n", "2", "--a", "1"]);
    assert_eq!(two["lindelof"], false);
    assert!(two["T"].as_f64().unwrap() > two["z"].as_f64().unwrap());
    assert_valid("highdim", &two);
    let one = json(&["highdim", "--a", "1"]);
    assert_eq!(one["lindelof"], true);
    assert!(one["T"].is_null());
    assert_valid("highdim", &one);
}

#[test]
fn stability_fixed_point() {
    let z = json(&["stability", "--a", "1"])["z"].as_f64().unwrap();
    let text = stdout(&nilcat(&["stability", "--a", "1", "--t1", &format!("{z}")]));
    let doc: Value = serde_json::from_str(&text).unwrap();
    assert!((doc["t2"].as_f64().unwrap() - z).abs() < 1e-8);
    assert_eq!(doc["classification"], "stable-unstable");
    assert_valid("stability", &doc);
    assert_key_order(&text, &["z", "t1", "t2", "classification"]);
}

#[test]
fn omega_document() {
    let doc = json(&["omega", "--a", "1"]);
    assert_valid("omega", &doc);
    let om = doc["omega_limit"].as_f64().unwrap();
    assert!(om > std::f64::consts::FRAC_PI_2 && om <= std::f64::consts::PI);
}

#[test]
fn sweep_is_ascending_and_matches_single_runs() {
    let grid = json(&["omega", "--a-grid", "2,0.5,1"]);
    assert_valid("grid", &grid);
    let entries = grid.as_array().unwrap();
    let a: Vec<f64> = entries.iter().map(|e| e["a"].as_f64().unwrap()).collect();
    assert_eq!(a, [0.5, 1.0, 2.0]);
    for e in entries {
        assert_valid("omega", &e["result"]);
        let single = json(&["omega", "--a", &format!("{}", e["a"])]);
        assert_eq!(single, e["result"]);
    }
    let range = json(&["index", "--a-grid", "0.5:1.5:0.5"]);
    assert_eq!(range.as_array().unwrap().len(), 3);
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["profile", "--a", "0.7"][..],
        &["index", "--a", "5"],
        &["highdim", "--n", "3", "--a", "0.5"],
    ] {
        assert_eq!(nilcat(args).stdout, nilcat(args).stdout, "{args:?}");
    }
}

#[test]
fn check_passes_and_validates() {
    let out = nilcat(&["check"]);
    let table = stdout(&out);
    assert_eq!(table.lines().filter(|l| l.starts_with("PASS")).count(), 12, "{table}");
    let doc = json(&["check", "--format", "json"]);
    assert_valid("check", &doc);
}

#[test]
fn files_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let svg = dir.path().join("p.svg");
    let out = nilcat(&[
        "profile",
        "--a",
        "1",
        "--t-max",
        "4",
        "--svg",
        svg.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("t,f,f_t,s,gamma\n"));
    let figure = std::fs::read_to_string(&svg).unwrap();
    assert_eq!(figure.matches("<polyline").count(), 2);
    assert_eq!(figure.matches("stroke-dasharray").count(), 2);
}
