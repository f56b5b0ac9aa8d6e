//! Resumable audit pipeline: fetch, parse, classify, profile, analyze,
//! report. Every stage reads the previous stage's files from the output
//! directory, so any stage can be rerun on its own.

mod analysis;
pub mod labels;
mod report;
mod stages;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acquisition::{AcquisitionError, Cache, FetchPolicy, Fetcher, ListRules};
use crate::model::{slugify, Platform};
use crate::taxonomy::{Classifier, ClassifierMode};

pub use analysis::{
    analyze, Analysis, DivergenceRow, NetworkSummary, PlatformScaling, SensitivityRow, TopicMetrics, TopicSummary,
};
pub use report::{canonical_json, emit_report, render_summary, report, round_sig, AuditReport, Provenance, TOOL_VERSION};
pub use stages::{
    classify, fetch, parse, profile, ClassificationRecord, ClassifyMeta, CorpusRow, EmptyArticle, ParseFailure,
    ParseSummary, PlatformCoverage, ProfileSummary,
};

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Acquisition(#[from] AcquisitionError),
    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("JSON error in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("CSV error in {path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error("missing input {0}; run the previous stage first")]
    MissingInput(PathBuf),
    #[error("{0}")]
    Empty(String),
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: StageError,
    },
}

pub(crate) fn in_stage<T>(stage: &'static str, r: Result<T, StageError>) -> Result<T, PipelineError> {
    r.map_err(|source| PipelineError::Stage { stage, source })
}

/// Endpoint settings for the chat-completion client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LlmSettings {
    pub base_url: String,
    pub model: String,
    /// Name of the environment variable holding the API key.
    pub api_key_env: String,
    pub timeout_secs: u64,
}

impl Default for LlmSettings {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4o-mini".into(),
            api_key_env: "AUDIT_LLM_API_KEY".into(),
            timeout_secs: 60,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AuditConfig {
    pub topics: PathBuf,
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Never touch the network; the cache must be complete.
    pub offline: bool,
    pub refresh: bool,
    pub max_concurrency: usize,
    pub host_interval_ms: u64,
    pub max_attempts: u32,
    pub backoff_ms: u64,
    pub user_agent: Option<String>,
    pub wikipedia_base: String,
    pub grokipedia_base: String,
    pub list_prefixes: Vec<String>,
    pub classifier: ClassifierMode,
    pub llm: LlmSettings,
    pub max_inflight: usize,
    pub homophily_threshold: f64,
    pub sensitivity_thresholds: Vec<f64>,
    pub alpha: f64,
    pub extremes_k: usize,
    pub density_bin_words: f64,
    /// Seeds of any randomized step, recorded verbatim in the report.
    pub seeds: BTreeMap<String, u64>,
}

impl Default for AuditConfig {
    fn default() -> Self {
        let policy = FetchPolicy::default();
        Self {
            topics: PathBuf::from("data/topics_72.csv"),
            cache_dir: PathBuf::from("cache"),
            out_dir: PathBuf::from("out"),
            offline: false,
            refresh: false,
            max_concurrency: 4,
            host_interval_ms: 1000,
            max_attempts: policy.max_attempts,
            backoff_ms: 1000,
            user_agent: None,
            wikipedia_base: policy.wikipedia_base,
            grokipedia_base: policy.grokipedia_base,
            list_prefixes: ListRules::default().prefixes,
            classifier: ClassifierMode::Hybrid,
            llm: LlmSettings::default(),
            max_inflight: 4,
            homophily_threshold: 0.75,
            sensitivity_thresholds: vec![0.65, 0.75, 0.85],
            alpha: 0.05,
            extremes_k: 50,
            density_bin_words: 5000.0,
            seeds: BTreeMap::new(),
        }
    }
}

impl AuditConfig {
    /// Checks value ranges; `need_topics` also requires the topics file.
    pub fn validate(&self, need_topics: bool) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::Config(m));
        if need_topics && !self.topics.is_file() {
            return bad(format!("topics file {} not found", self.topics.display()));
        }
        for t in std::iter::once(&self.homophily_threshold).chain(&self.sensitivity_thresholds) {
            if !(*t > 0.0 && *t < 1.0) {
                return bad(format!("threshold {t} outside (0, 1)"));
            }
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha {} outside (0, 1)", self.alpha));
        }
        if self.extremes_k == 0 || self.density_bin_words <= 0.0 {
            return bad("extremes_k and density_bin_words must be positive".into());
        }
        Ok(())
    }

    pub fn fetch_policy(&self) -> FetchPolicy {
        let d = FetchPolicy::default();
        FetchPolicy {
            max_attempts: self.max_attempts,
            initial_backoff: std::time::Duration::from_millis(self.backoff_ms),
            host_interval: std::time::Duration::from_millis(self.host_interval_ms),
            user_agent: self.user_agent.clone().unwrap_or(d.user_agent),
            timeout: d.timeout,
            refresh: self.refresh,
            wikipedia_base: self.wikipedia_base.clone(),
            grokipedia_base: self.grokipedia_base.clone(),
        }
    }

    pub fn layout(&self) -> Layout {
        Layout { root: self.out_dir.clone() }
    }

    pub fn cache(&self) -> Cache {
        Cache::new(&self.cache_dir)
    }

    pub fn list_rules(&self) -> ListRules {
        ListRules { prefixes: self.list_prefixes.clone() }
    }
}

/// File layout of the output directory.
#[derive(Debug, Clone)]
pub struct Layout {
    pub root: PathBuf,
}

impl Layout {
    pub fn manifest(&self) -> PathBuf {
        self.root.join("manifest.json")
    }
    pub fn parsed(&self, platform: Platform, title: &str) -> PathBuf {
        self.root.join("parsed").join(platform.slug()).join(format!("{}.json", slugify(title)))
    }
    pub fn parse_summary(&self) -> PathBuf {
        self.root.join("parse_summary.json")
    }
    pub fn corpus_csv(&self) -> PathBuf {
        self.root.join("corpus.csv")
    }
    pub fn classifications(&self) -> PathBuf {
        self.root.join("classifications.jsonl")
    }
    pub fn classify_meta(&self) -> PathBuf {
        self.root.join("classify_meta.json")
    }
    pub fn profiles(&self) -> PathBuf {
        self.root.join("profiles.jsonl")
    }
    pub fn global_profile(&self) -> PathBuf {
        self.root.join("global_profile.json")
    }
    pub fn descriptive_stats(&self) -> PathBuf {
        self.root.join("descriptive_stats.json")
    }
    pub fn category_means_csv(&self) -> PathBuf {
        self.root.join("category_means.csv")
    }
    pub fn analysis(&self) -> PathBuf {
        self.root.join("analysis.json")
    }
    pub fn divergence_csv(&self) -> PathBuf {
        self.root.join("divergence.csv")
    }
    pub fn topic_metrics(&self) -> PathBuf {
        self.root.join("topic_metrics.json")
    }
    pub fn networks_dir(&self) -> PathBuf {
        self.root.join("networks")
    }
    pub fn assortativity_csv(&self) -> PathBuf {
        self.root.join("assortativity_sensitivity.csv")
    }
    pub fn scaling(&self) -> PathBuf {
        self.root.join("scaling.json")
    }
    pub fn scatter_csv(&self) -> PathBuf {
        self.root.join("scatter.csv")
    }
    pub fn extremes_csv(&self) -> PathBuf {
        self.root.join("extremes.csv")
    }
    pub fn agreement(&self) -> PathBuf {
        self.root.join("agreement.json")
    }
    pub fn report(&self) -> PathBuf {
        self.root.join("report.json")
    }
    pub fn summary(&self) -> PathBuf {
        self.root.join("summary.txt")
    }
}

pub(crate) fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), StageError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).map_err(|source| StageError::Io { path: dir.into(), source })?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|source| StageError::Io { path: dir.into(), source })?;
    std::io::Write::write_all(&mut tmp, bytes).map_err(|source| StageError::Io { path: path.into(), source })?;
    tmp.persist(path).map_err(|e| StageError::Io { path: path.into(), source: e.error })?;
    Ok(())
}

pub(crate) fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), StageError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|source| StageError::Json { path: path.into(), source })?;
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

pub(crate) fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, StageError> {
    if !path.exists() {
        return Err(StageError::MissingInput(path.into()));
    }
    let raw = fs::read(path).map_err(|source| StageError::Io { path: path.into(), source })?;
    serde_json::from_slice(&raw).map_err(|source| StageError::Json { path: path.into(), source })
}

pub(crate) fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), StageError> {
    let mut out = Vec::new();
    for r in rows {
        serde_json::to_writer(&mut out, r).map_err(|source| StageError::Json { path: path.into(), source })?;
        out.push(b'\n');
    }
    write_bytes(path, &out)
}

pub(crate) fn read_jsonl<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, StageError> {
    if !path.exists() {
        return Err(StageError::MissingInput(path.into()));
    }
    let raw = fs::read_to_string(path).map_err(|source| StageError::Io { path: path.into(), source })?;
    raw.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(|source| StageError::Json { path: path.into(), source }))
        .collect()
}

pub(crate) fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), StageError> {
    let csv_err = |e: csv::Error| StageError::Csv { path: path.into(), message: e.to_string() };
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| StageError::Csv { path: path.into(), message: e.to_string() })?;
    write_bytes(path, &bytes)
}

pub(crate) fn read_csv<T: serde::de::DeserializeOwned>(path: &Path) -> Result<Vec<T>, StageError> {
    if !path.exists() {
        return Err(StageError::MissingInput(path.into()));
    }
    let mut r = csv::Reader::from_path(path).map_err(|e| StageError::Csv { path: path.into(), message: e.to_string() })?;
    r.deserialize().map(|row| row.map_err(|e| StageError::Csv { path: path.into(), message: e.to_string() })).collect()
}

/// Stores an agreement result so the next report includes it.
pub fn write_agreement<T: Serialize>(cfg: &AuditConfig, value: &T) -> Result<PathBuf, PipelineError> {
    let path = cfg.layout().agreement();
    in_stage("agree", write_json(&path, value))?;
    Ok(path)
}

/// Collaborators that are not plain configuration.
pub struct PipelineDeps {
    /// `None` means offline: the cache is the only source.
    pub fetcher: Option<Fetcher>,
    pub classifier: Classifier,
}

/// Runs every stage in order and writes the report.
pub fn run_pipeline(cfg: &AuditConfig, deps: &PipelineDeps) -> Result<AuditReport, PipelineError> {
    cfg.validate(true)?;
    let fetcher = if cfg.offline { None } else { deps.fetcher.as_ref() };
    fetch(cfg, fetcher)?;
    parse(cfg)?;
    classify(cfg, &deps.classifier)?;
    profile(cfg)?;
    analyze(cfg)?;
    let r = report(cfg)?;
    emit_report(cfg, &r)?;
    Ok(r)
}
