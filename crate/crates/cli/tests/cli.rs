use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_mzi-limits");

fn run(args: &[&str]) -> Output {
    Command::new(BIN)
        .args(args)
        .env_remove("MZI_OUT_DIR")
        .output()
        .unwrap()
}

fn csv_rows(out: &Output) -> Vec<Vec<String>> {
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut r = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(
        r.headers().unwrap().iter().collect::<Vec<_>>(),
        [
            "recipe",
            "probe",
            "T",
            "r",
            "phi",
            "value",
            "bound",
            "snl",
            "beats_snl",
            "flags"
        ]
    );
    r.records()
        .map(|x| x.unwrap().iter().map(String::from).collect())
        .collect()
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn error_record(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap()
}

#[test]
fn crb_row_for_squeezed_probe() {
    let out = run(&["crb", "--probe", "squeezed:r=0.8814", "--T", "0.25"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "two-arm-crb");
    assert!((num(&rows[0][6]) - 4.0 / 3.0).abs() < 1e-3);
    assert!((num(&rows[0][7]) - 1.0).abs() < 1e-3);
    assert_eq!(rows[0][8], "false");
    assert!(rows[0][9].contains("loose-beats-snl"));
}

#[test]
fn small_phase_cfi() {
    let out = run(&["gaussian-cfi", "--nbar", "1", "--T", "0.5", "--phi", "1e-4"]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    let cfi = rows.iter().find(|r| r[0] == "two-outcome-cfi").unwrap();
    assert!((num(&cfi[5]) - 5.0).abs() < 5e-3);
    assert_eq!(cfi[8], "true");
}

#[test]
fn sweep_keeps_grid_order_and_finds_balanced_minimum() {
    let out = run(&[
        "sweep",
        "--command",
        "crb",
        "--T",
        "0.05:0.95:19",
        "--probe",
        "fock:n=2",
    ]);
    assert!(out.status.success());
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 19);
    let ts: Vec<f64> = rows.iter().map(|r| num(&r[2])).collect();
    assert!(ts.windows(2).all(|w| w[0] < w[1]));
    let best = rows
        .iter()
        .min_by(|a, b| num(&a[6]).total_cmp(&num(&b[6])))
        .unwrap();
    assert_eq!(best[2], "0.5");
    assert!(rows.iter().all(|r| r[9] == "single-parameter"));
}

#[test]
fn json_output_and_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command":"qfi","probe":{"kind":"fock","n":1},"grid":{"T":[0.5]},"output":"csv"}"#,
    )
    .unwrap();
    let out = run(&[
        "qfim",
        "--config",
        cfg.to_str().unwrap(),
        "--probe",
        "coherent:alpha=1",
        "--output",
        "json",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let recipes: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["recipe"].as_str().unwrap())
        .collect();
    assert_eq!(recipes, ["qfim-dd", "qfim-ss", "qfim-sd"]);
    assert_eq!(v[0]["value"], 1.0);
}

#[test]
fn default_output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(BIN)
        .args(["phase-averaged", "--probe", "thermal:nbar=2", "--T", "0.5"])
        .env("MZI_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(dir.path().join("phase-averaged.csv")).unwrap();
    assert!(text.starts_with("recipe,probe,T,"));
    assert!(text.contains("phase-averaged-qfi,thermal:nbar=2,0.5,,,2,"));
}

#[test]
fn config_errors_exit_2_with_pointer() {
    let out = run(&["crb", "--probe", "fock:n=2", "--T", "1.2"]);
    assert_eq!(out.status.code(), Some(2));
    let rec = error_record(&out);
    assert_eq!(rec["error"], "config");
    assert_eq!(rec["violations"][0]["pointer"], "/grid/T/0");

    let out = run(&["crb", "--T", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["violations"][0]["pointer"], "/probe");

    let out = run(&["crb", "--probe", "laser:power=3", "--T", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["crb", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "config");
}

#[test]
fn numeric_errors_exit_3() {
    let out = run(&[
        "campaign", "--nbar", "1", "--T", "0.5", "--phi", "0", "--m", "100", "--reps", "5",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let rec = error_record(&out);
    assert_eq!(rec["error"], "numeric");
    assert_eq!(rec["kind"], "degenerate-probability");
}

fn validate_file(dir: &Path, body: &str) -> (Option<i32>, Value) {
    let path = dir.join("cfg.json");
    std::fs::write(&path, body).unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    (
        out.status.code(),
        serde_json::from_slice(&out.stdout).unwrap(),
    )
}

#[test]
fn validate_reports() {
    let dir = tempfile::tempdir().unwrap();
    let (code, rep) = validate_file(
        dir.path(),
        r#"{"command":"crb","probe":{"kind":"fock","n":2},"grid":{"T":[0.25]}}"#,
    );
    assert_eq!(code, Some(0));
    assert_eq!(rep["valid"], true);
    assert_eq!(rep["violations"].as_array().unwrap().len(), 0);

    let (code, rep) = validate_file(
        dir.path(),
        r#"{"command":"crb","probe":{"kind":"fock","n":2},"grid":{"T":[1.2]}}"#,
    );
    assert_eq!(code, Some(2));
    assert_eq!(rep["violations"][0]["pointer"], "/grid/T/0");

    let (code, rep) = validate_file(dir.path(), r#"{"command":"crb","grid":{"T":[0.5]}}"#);
    assert_eq!(code, Some(2));
    assert_eq!(rep["violations"][0]["pointer"], "/probe");

    let (code, _) = validate_file(dir.path(), "{ not json");
    assert_eq!(code, Some(2));

    let out = run(&[
        "validate",
        dir.path().join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_record(&out)["error"], "io");
}

#[test]
fn shipped_schema_lists_every_config_field() {
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(concat!(
            env!("CARGO_MANIFEST_DIR"),
            "/../../docs/config.schema.json"
        ))
        .unwrap(),
    )
    .unwrap();
    let props: Vec<&String> = schema["properties"].as_object().unwrap().keys().collect();
    let full = serde_json::json!({
        "command": "sweep",
        "sweep_command": "campaign",
        "probe": {"kind": "squeezed_vacuum", "r": 0.5},
        "generator": "sum",
        "grid": {"T": [0.5], "r": [0.5], "phi": [0.2]},
        "output": "json",
        "seed": 3,
        "m": 100,
        "reps": 10,
        "tail_tol": 1e-9,
        "out_path": "x.json",
    });
    assert!(mzi_cli::validate::validate_value(&full).is_empty());
    let mut keys: Vec<&String> = full.as_object().unwrap().keys().collect();
    keys.sort();
    let mut props = props;
    props.sort();
    assert_eq!(keys, props);
}
