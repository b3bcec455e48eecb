use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn umbilic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_umbilic")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_then_verify_round_sphere() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("sphere5.off");
    let out = umbilic(&["gen", "--kind", "sphere", "--subdiv", "5", "--out", path(&mesh)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let out = umbilic(&["verify", "--mesh", path(&mesh), "--epsilon", "0.2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = stdout_json(&out);
    assert_eq!(doc["schema"], "umbilic/1");
    assert_eq!(doc["command"], "verify");
    let report = &doc["report"];
    assert_eq!(report["contained"], true);
    assert_eq!(report["hypothesis_holds"], true);
    assert!((report["lambda1"].as_f64().unwrap() - 2.0).abs() < 0.02);
    assert_eq!(report["constants"]["c_source"], "convexity_threshold");
    assert!(doc["metadata"]["threads"].as_u64().unwrap() >= 1);
}

#[test]
fn verify_writes_to_file_and_floors_alpha() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("s.obj");
    let report = dir.path().join("report.json");
    assert!(umbilic(&["gen", "--subdiv", "3", "--out", path(&mesh)])
        .status
        .success());
    let out = umbilic(&[
        "verify",
        "--mesh",
        path(&mesh),
        "--epsilon",
        "0.5",
        "--alpha",
        "0.01",
        "--out",
        path(&report),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["report"]["constants"]["alpha"], 0.1);
    assert!(!doc["notes"].as_array().unwrap().is_empty());
}

#[test]
fn open_mesh_fails_with_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("open.off");
    std::fs::write(
        &mesh,
        "OFF\n4 3 0\n1 1 1\n1 -1 -1\n-1 1 -1\n-1 -1 1\n3 0 1 2\n3 0 3 1\n3 0 2 3\n",
    )
    .unwrap();
    let out = umbilic(&["verify", "--mesh", path(&mesh), "--epsilon", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    let record = stdout_json(&out);
    assert_eq!(record["schema"], "umbilic/1");
    assert_eq!(record["error"]["kind"], "invalid_mesh");
    let failed: Vec<&str> = record["error"]["failed_checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(failed.contains(&"closed"), "{failed:?}");
}

#[test]
fn missing_mesh_is_an_io_error() {
    let out = umbilic(&["analyze", "--mesh", "/nonexistent/x.off"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "mesh");
}

#[test]
fn analyze_csv_and_laplace_dump() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("e.off");
    let gen = umbilic(&[
        "gen",
        "--kind",
        "ellipsoid",
        "--axes",
        "1,1.2,1.5",
        "--subdiv",
        "2",
        "--out",
        path(&mesh),
    ]);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));
    let prefix = dir.path().join("lap");
    let out = umbilic(&[
        "analyze",
        "--mesh",
        path(&mesh),
        "--format",
        "csv",
        "--dump-laplace",
        path(&prefix),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 163, "header plus one row per vertex");
    let mass = std::fs::read_to_string(dir.path().join("lap.mass.txt")).unwrap();
    assert_eq!(mass.lines().count(), 162);
    assert!(dir.path().join("lap.stiffness.txt").exists());
}

#[test]
fn sweep_csv_has_fit_row() {
    let out = umbilic(&["sweep", "--eps", "0.4,0.2", "--subdiv", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let kinds: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(kinds, ["row", "row", "fit"]);
}

#[test]
fn ellipsoid_needs_three_axes() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = dir.path().join("e.off");
    let out = umbilic(&["gen", "--kind", "ellipsoid", "--axes", "1,2", "--out", path(&mesh)]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "config");
}

#[test]
fn bad_family_is_a_config_error() {
    let out = umbilic(&["sweep", "--eps", "0.4", "--family", "q2"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout_json(&out)["error"]["kind"], "config");
}
