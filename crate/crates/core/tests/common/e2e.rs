//! The three-pair offline corpus used for end-to-end runs.

use std::path::Path;
use std::sync::Arc;

use epiaudit::acquisition::{Cache, FetchPolicy, RawDocument};
use epiaudit::pipeline::{AuditConfig, PipelineDeps};
use epiaudit::taxonomy::{Classifier, ClassifierMode, NoLookThrough};
use epiaudit::Platform;

pub fn fixture_dir() -> std::path::PathBuf {
    super::fixtures().join("e2e")
}

/// Copies the topic list and seeds a cache under `root`; returns an
/// offline, rules-only configuration writing to `root/out`.
pub fn setup(root: &Path) -> AuditConfig {
    let topics = root.join("topics.csv");
    std::fs::copy(fixture_dir().join("topics.csv"), &topics).unwrap();
    let cache = Cache::new(root.join("cache"));
    let policy = FetchPolicy::default();
    let at = "2025-11-02T00:00:00Z".parse().unwrap();
    for p in Platform::ALL {
        let dir = fixture_dir().join("pages").join(p.slug());
        let mut files: Vec<_> = std::fs::read_dir(&dir).unwrap().map(|e| e.unwrap().path()).collect();
        files.sort();
        for f in files {
            let title = f.file_stem().unwrap().to_str().unwrap().to_string();
            let body = std::fs::read(&f).unwrap();
            cache.store(&RawDocument::new(p, &title, &policy.article_url(p, &title), body, at)).unwrap();
        }
    }
    AuditConfig {
        topics,
        cache_dir: root.join("cache"),
        out_dir: root.join("out"),
        offline: true,
        classifier: ClassifierMode::Rules,
        ..AuditConfig::default()
    }
}

pub fn deps() -> PipelineDeps {
    PipelineDeps { fetcher: None, classifier: Classifier::new(ClassifierMode::Rules, None, Arc::new(NoLookThrough)) }
}

/// report.json with the generation timestamp blanked.
pub fn masked_report(out: &Path) -> String {
    let text = std::fs::read_to_string(out.join("report.json")).unwrap();
    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["provenance"]["generated_at"] = serde_json::Value::String("<masked>".into());
    epiaudit::pipeline::canonical_json(&v)
}
