use std::path::Path;
use std::process::{Command, Output};

use quadlogic::experiments::SurveyReport;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadlogic")).args(args).output().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_taiji_writes_every_point() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("taiji.csv");
    assert!(run(&["gen-taiji", "-R", "20", "--out", p(&out)]).status.success());
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().next(), Some("x,y,label"));
    assert_eq!(text.lines().count(), 1246);
    let labels: Vec<&str> = text.lines().skip(1).map(|l| l.rsplit(',').next().unwrap()).collect();
    assert!(labels.iter().all(|&l| l == "0" || l == "1"));
}

#[test]
fn errors_are_one_line_with_a_kind() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("x.json");
    let bad = run(&["train", "--arch", "2-0-1", "--out", p(&out)]);
    assert_eq!(bad.status.code(), Some(1));
    let err = stderr(&bad);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with("error kind=invalid-architecture msg=\""), "{err}");

    let usage = run(&["survey", "--out", p(&out)]);
    assert_eq!(usage.status.code(), Some(2));
    assert!(stderr(&usage).starts_with("error kind=usage msg="));

    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn missing_mnist_names_the_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let r = run(&["mnist-spectrum", "--data-dir", p(dir.path()), "--out", p(&out)]);
    assert_eq!(r.status.code(), Some(1));
    let err = stderr(&r);
    assert!(err.starts_with("error kind=missing-data"), "{err}");
    assert!(err.contains("QUADLOGIC_MNIST_DIR"));
}

#[test]
fn witness_rasters_differ() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.pgm"), dir.path().join("b.pgm"));
    assert!(run(&["raster", "--preset", "witness-a", "--resolution", "32", "--out", p(&a)]).status.success());
    assert!(run(&["raster", "--preset", "witness-b", "--resolution", "32", "--out", p(&b)]).status.success());
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(a.starts_with(b"P5\n32 32\n255\n"));
    assert_eq!(a.len(), b"P5\n32 32\n255\n".len() + 32 * 32);
    assert_ne!(a, b);

    let unknown = run(&["raster", "--preset", "nand", "--out", p(&dir.path().join("c.pgm"))]);
    assert_eq!(unknown.status.code(), Some(1));
}

#[test]
fn trained_network_can_be_rasterized() {
    let dir = tempfile::tempdir().unwrap();
    let (net, pgm) = (dir.path().join("net.json"), dir.path().join("net.pgm"));
    let r = run(&["train", "--dataset", "xor", "--arch", "2-1", "--iters", "50", "--lr-schedule", "1.0", "--out", p(&net)]);
    assert!(r.status.success(), "{}", stderr(&r));
    let value: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&net).unwrap()).unwrap();
    assert!(value["train_accuracy"].as_f64().is_some());
    assert_eq!(value["spectrum"]["layers"].as_array().map(Vec::len), Some(1));
    let r = run(&["raster", "--network", p(&net), "--resolution", "16", "--out", p(&pgm)]);
    assert!(r.status.success(), "{}", stderr(&r));
    assert_eq!(std::fs::read(&pgm).unwrap().len(), b"P5\n16 16\n255\n".len() + 256);
}

#[test]
fn sharp_vs_flat_rejects_k_past_the_distinct_keys() {
    let dir = tempfile::tempdir().unwrap();
    let (survey, split) = (dir.path().join("s.json"), dir.path().join("split.json"));
    let r = run(&[
        "survey", "--arch", "2-3-1", "--target", "3", "--threshold", "0", "--iters", "5", "--out", p(&survey),
    ]);
    assert!(r.status.success(), "{}", stderr(&r));
    let report: SurveyReport = serde_json::from_str(&std::fs::read_to_string(&survey).unwrap()).unwrap();
    assert_eq!(report.runs_kept, 3);
    let k = report.distinct_keys().to_string();
    let r = run(&["sharp-vs-flat", "--report", p(&survey), "-k", &k, "--out", p(&split)]);
    assert_eq!(r.status.code(), Some(1));
    assert!(stderr(&r).starts_with("error kind=invalid-parameter"));
}

#[test]
fn threshold_accepts_fractions_and_rejects_garbage() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.json");
    let base = ["survey", "--arch", "2-3-1", "--target", "1", "--iters", "2", "--max-attempts", "1"];
    let mut frac = base.to_vec();
    frac.extend(["--threshold", "1/2", "--out", p(&out)]);
    assert!(run(&frac).status.success());
    let report: SurveyReport = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.config.threshold, 0.5);
    let mut bad = base.to_vec();
    bad.extend(["--threshold", "half", "--out", p(&out)]);
    assert_eq!(run(&bad).status.code(), Some(1));
}
