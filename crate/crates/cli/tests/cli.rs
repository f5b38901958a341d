use std::path::PathBuf;
use std::process::{Command, Output};

fn examples() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/examples")
}

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_esum-lab"))
        .args(args)
        .current_dir(examples())
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let out = lab(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn lattice_commands() {
    let v = json(&["norm", "--spec", "l2_4.json", "--vector", "vector4.json"]);
    assert!((v["norm"].as_f64().unwrap() - 14.25f64.sqrt()).abs() < 1e-12);
    let v = json(&["ce", "--spec", "ramp_half_4.json"]);
    assert!((v["horizon_value"].as_f64().unwrap() - 1.6).abs() < 1e-9);
    assert_eq!(v["asymptotic"]["verdict"], "bounded");
}

#[test]
fn esum_commands() {
    let v = json(&[
        "esum-norm",
        "--esum",
        "esum_m2_l2.json",
        "--element",
        "esum_a.json",
    ]);
    assert!((v["norm"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-12);
    let v = json(&[
        "esum-mul",
        "--esum",
        "esum_m2_l2.json",
        "--a",
        "esum_a.json",
        "--b",
        "esum_b.json",
    ]);
    assert_eq!(v["submultiplicative"], true);
    let v = json(&["bai-check", "--esum", "esum_m2_l2.json"]);
    assert_eq!(v["holds"], true);
}

#[test]
fn am_command() {
    let v = json(&["am", "--n", "3", "--spec", "l2_4.json"]);
    assert!((v["bracket"]["lower"].as_f64().unwrap() - 3.0).abs() < 1e-6);
    assert!((v["bracket"]["upper"].as_f64().unwrap() - 3.0).abs() < 1e-6);
}

#[test]
fn jsum_commands() {
    let v = json(&[
        "jnorm",
        "--system",
        "jsystem_scalar.json",
        "--element",
        "jelement_scalar.json",
        "--bruteforce",
    ]);
    assert!((v["jnorm"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-12);
    assert!((v["bruteforce"].as_f64().unwrap() - 3f64.sqrt()).abs() < 1e-12);
    let v = json(&[
        "jcheck",
        "--system",
        "jsystem_pair.json",
        "--samples",
        "300",
    ]);
    assert_eq!(v["passed"], true);
}

#[test]
fn derivation_commands() {
    let v = json(&["wa", "--algebra", "m2.json"]);
    assert_eq!(
        (v["dim_derivations"].as_u64(), v["dim_inner"].as_u64()),
        (Some(3), Some(3))
    );
    let v = json(&["wa", "--algebra", "square_zero.json"]);
    assert_eq!(v["weakly_amenable"], false);
    assert_eq!(v["certificate"]["kind"], "not_inner");
    let v = json(&["wam", "--algebra", "square_zero.json", "--samples", "5"]);
    assert_eq!(v["upper"], "infinity");
    let v = json(&["wam", "--algebra", "c3.json", "--samples", "5"]);
    assert_eq!(
        (v["lower"].as_f64(), v["exact_zero"].as_bool()),
        (Some(0.0), Some(true))
    );
    let out = lab(&["esum-wa", "--esum", "esum_mixed_sup.json", "--samples", "5"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["offending"], serde_json::json!([1]));
    let v = json(&["lp-demo", "--B", "m2.json", "--p", "2", "--sizes", "2,4,8"]);
    assert_eq!(v["holds"], true);
}

#[test]
fn bad_input_is_reported_not_panicked() {
    let out = lab(&["ce", "--spec", "vector4.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn verify_reads_extra_case_documents() {
    let dir = tempfile::tempdir().unwrap();
    let out = lab(&[
        "verify",
        "--cases",
        "cases",
        "--format",
        "csv",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv
        .lines()
        .any(|l| l.starts_with("doc.am.l2.n3,") && l.ends_with(",pass")));
    assert!(!dir.path().join("report.json").exists());
}
