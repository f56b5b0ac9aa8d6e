//! Drives the `audit` binary end to end.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use epiaudit::acquisition::{Cache, FetchPolicy, RawDocument};
use epiaudit::Platform;

fn core_fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures")
}

fn audit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_audit")).args(args).env_remove("RUST_LOG").output().expect("run audit")
}

fn seed_cache(root: &Path) {
    let cache = Cache::new(root.join("cache"));
    let policy = FetchPolicy::default();
    for p in Platform::ALL {
        let dir = core_fixtures().join("e2e/pages").join(p.slug());
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            let title = path.file_stem().unwrap().to_str().unwrap().to_string();
            let body = std::fs::read(&path).unwrap();
            let at = "2025-11-02T00:00:00Z".parse().unwrap();
            cache.store(&RawDocument::new(p, &title, &policy.article_url(p, &title), body, at)).unwrap();
        }
    }
}

#[test]
fn agree_on_a_matrix() {
    let grid = core_fixtures().join("agreement/grid1.csv");
    let out = audit(&["agree", "--matrix", grid.to_str().unwrap(), "--metric", "interval"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["items"], 15);
    assert_eq!(v["raters"], 4);
    assert!((v["alpha"]["alpha"].as_f64().unwrap() - 0.9847689075630252).abs() < 1e-12);
}

#[test]
fn offline_run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    seed_cache(dir.path());
    let topics = core_fixtures().join("e2e/topics.csv");
    let cache = dir.path().join("cache");
    let out_dir = dir.path().join("out");
    let out = audit(&[
        "--offline",
        "--classifier",
        "rules",
        "--topics",
        topics.to_str().unwrap(),
        "--cache",
        cache.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "run",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).contains("report.json"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["sections"]["corpus"]["eligible"], 3);
    assert!(out_dir.join("summary.txt").is_file());

    // single stages rerun from the outputs on disk
    let again = audit(&["--out", out_dir.to_str().unwrap(), "--cache", cache.to_str().unwrap(), "metrics"]);
    assert!(again.status.success(), "{}", String::from_utf8_lossy(&again.stderr));
    assert!(String::from_utf8_lossy(&again.stdout).contains("3 pairs analyzed"));
}

#[test]
fn config_file_is_read() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("audit.toml");
    std::fs::write(&cfg, "topics = \"nowhere.csv\"\nclassifier = \"rules\"\noffline = true\n").unwrap();
    let out = audit(&["--config", cfg.to_str().unwrap(), "run"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("nowhere.csv"));
}

#[test]
fn missing_topic_list_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = audit(&["--offline", "--topics", "/definitely/not/here.csv", "--out", out_dir.to_str().unwrap(), "run"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("not found"));
    assert!(!out_dir.exists());
}

#[test]
fn agree_needs_inputs() {
    let out = audit(&["agree"]);
    assert!(!out.status.success());
}
