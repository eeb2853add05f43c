use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use uniformize_core::io::load_result;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(format!("{name}.json"))
}

fn uniformize(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uniformize"))
        .args(args)
        .env_remove("UNIFORMIZE_THREADS")
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn failed_verification_exits_one_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = fixture("wheel");
    let out_dir = dir.path().to_str().unwrap();
    let out = uniformize(&["run", mesh.to_str().unwrap(), "--out", out_dir, "--format", "json,svg"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    assert!(stderr(&out).contains("FAIL piece 0: tiling_completeness"));
    let doc = load_result(dir.path().join("wheel.result.json")).unwrap();
    assert_eq!(doc.cell_count(), 4);
    let svg = std::fs::read_to_string(dir.path().join("wheel.svg")).unwrap();
    assert_eq!(svg.matches(r#"class="shell""#).count(), 4);
}

#[test]
fn no_verify_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = fixture("wheel");
    let out = uniformize(&["run", mesh.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--no-verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn strict_writes_nothing_on_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = fixture("wheel");
    let out = uniformize(&["run", mesh.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!dir.path().join("wheel.result.json").exists());
}

#[test]
fn k_and_slit_options_reach_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let mesh = fixture("g8x3");
    let out = uniformize(&[
        "run",
        mesh.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--k",
        "2.5",
        "--slit",
        "20,12,4",
        "--no-verify",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc = load_result(dir.path().join("g8x3.result.json")).unwrap();
    assert_eq!(doc.input.k, 2.5);
    assert_eq!(doc.pieces[0].slit, vec![20, 12, 4]);
}

#[test]
fn negative_conductance_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("wheel")).unwrap();
    let mut json: serde_json::Value = serde_json::from_str(&text).unwrap();
    json["conductances"] = serde_json::json!(-1.0);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, json.to_string()).unwrap();
    let out = uniformize(&["run", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap(), "--strict"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("conductance"), "{}", stderr(&out));
}

#[test]
fn bad_options_exit_two() {
    let mesh = fixture("wheel");
    let mesh = mesh.to_str().unwrap();
    assert_eq!(uniformize(&["run", mesh, "--slit", "3"]).status.code(), Some(2));
    assert_eq!(uniformize(&["run", mesh, "--format", "png"]).status.code(), Some(2));
    assert_eq!(uniformize(&["run", mesh, "--tolerance", "-1"]).status.code(), Some(2));
    assert_eq!(uniformize(&["run", "/no/such/mesh.json"]).status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_uniformize"))
        .args(["run", mesh])
        .env("UNIFORMIZE_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_count_does_not_change_output() {
    let mesh = fixture("irregular_b");
    let mut texts = Vec::new();
    for threads in ["1", "4"] {
        let dir = tempfile::tempdir().unwrap();
        let out = Command::new(env!("CARGO_BIN_EXE_uniformize"))
            .args(["run", mesh.to_str().unwrap(), "--out", dir.path().to_str().unwrap()])
            .env("UNIFORMIZE_THREADS", threads)
            .output()
            .unwrap();
        assert_ne!(out.status.code(), Some(2), "{}", stderr(&out));
        texts.push(std::fs::read(dir.path().join("irregular_b.result.json")).unwrap());
    }
    assert_eq!(texts[0], texts[1]);
}
