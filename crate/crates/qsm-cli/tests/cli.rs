//! End-to-end tests of the `qsm` binary: exit-code contract, report shape,
//! and byte-level determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qsm_bin() -> &'static str {
    env!("CARGO_BIN_EXE_qsm")
}

fn descriptors() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../descriptors")
}

fn run(args: &[&str]) -> Output {
    Command::new(qsm_bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

#[test]
fn validate_metric_space_passes_with_qm_flag() {
    let path = descriptors().join("metric_space.json");
    let out = run(&["--no-timestamp", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["quantum_metric"], true);
    assert_eq!(v["config"]["seed"], 0);
}

#[test]
fn validate_semimetric_passes_without_qm_flag() {
    let path = descriptors().join("semimetric_space.json");
    let out = run(&["--no-timestamp", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["quantum_metric"], false);
}

#[test]
fn validate_pauli_action_passes() {
    let path = descriptors().join("pauli_action.json");
    let out = run(&["--no-timestamp", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["quantum_metric"], true);
}

#[test]
fn validate_transpose_map_fails_with_exit_one() {
    // The transpose is unital and *-preserving but not multiplicative.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("transpose.json");
    std::fs::write(
        &path,
        r#"{
            "type": "homomorphism",
            "source": {"blocks": [2]},
            "target": {"blocks": [2]},
            "matrix": [
                [[1,0],[0,0],[0,0],[0,0]],
                [[0,0],[0,0],[1,0],[0,0]],
                [[0,0],[1,0],[0,0],[0,0]],
                [[0,0],[0,0],[0,0],[1,0]]
            ]
        }"#,
    )
    .unwrap();
    let out = run(&["--no-timestamp", "validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], false);
    let mult = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["id"] == "hom.mult")
        .expect("multiplicativity check present");
    assert_eq!(mult["passed"], false);
}

#[test]
fn malformed_json_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["validate", "/nonexistent/nope.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn dist_two_point_masses() {
    let path = descriptors().join("dist_two_point.json");
    let out = run(&[
        "--no-timestamp",
        "dist",
        path.to_str().unwrap(),
        "--i",
        "0",
        "--j",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!((v["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert_eq!(v["exact"], true);
    assert_eq!(v["method"], "lp_dual");
    // Primal cross-check agrees in the same report.
    assert!((v["primal"]["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!(v["primal"]["agreement"].as_f64().unwrap() < 1e-8);
}

#[test]
fn dist_same_state_is_zero() {
    let path = descriptors().join("dist_two_point.json");
    let out = run(&["--no-timestamp", "dist", path.to_str().unwrap(), "--i", "0", "--j", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["value"].as_f64().unwrap(), 0.0);
}

#[test]
fn dist_out_of_range_index_exits_two() {
    let path = descriptors().join("dist_two_point.json");
    let out = run(&["dist", path.to_str().unwrap(), "--i", "0", "--j", "7"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn induce_classical_family_matches_direct_formula() {
    let path = descriptors().join("classical_family.json");
    let out = run(&["--no-timestamp", "induce", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    // d₁(0,1) = max(d₀(0,2), d₀(1,1)) = 2 between the two point masses.
    let d = v["d"].as_array().unwrap();
    assert!((d[0][1].as_f64().unwrap() - 2.0).abs() < 1e-8);
    assert_eq!(v["entries_exact"], true);
    assert_eq!(v["degenerate"], false);
}

#[test]
fn induce_flip_family_has_full_density() {
    let path = descriptors().join("flip_family.json");
    let out = run(&["--no-timestamp", "induce", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["density_full"], true);
}

#[test]
fn verify_unknown_suite_exits_two() {
    let out = run(&["verify", "nope", "--count", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_count_zero_passes_with_warning() {
    let out = run(&["--no-timestamp", "verify", "duality", "--count", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert!(!v["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn verify_duality_small_run_passes() {
    let out = run(&["--no-timestamp", "--seed", "11", "verify", "duality", "--count", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], true);
    assert_eq!(v["seed"], 11);
}

#[test]
fn reports_are_byte_identical_for_one_seed() {
    let args = [
        "--no-timestamp",
        "--seed",
        "5",
        "verify",
        "duality",
        "--count",
        "3",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn csv_format_emits_rows() {
    let path = descriptors().join("metric_space.json");
    let out = run(&[
        "--no-timestamp",
        "--format",
        "csv",
        "validate",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.starts_with("id,passed,residual,detail"));
    assert!(text.lines().count() > 3);
}

#[test]
fn stdin_input_works() {
    use std::io::Write;
    let mut child = Command::new(qsm_bin())
        .args(["--no-timestamp", "validate", "-"])
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(br#"{"type":"semimetric","d":[[0.0,1.0],[1.0,0.0]]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
}
