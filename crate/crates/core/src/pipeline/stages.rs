//! Fetch, parse, classify and profile stages.

use std::collections::{BTreeMap, HashMap};

use chrono::Utc;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    in_stage, read_csv, read_json, read_jsonl, write_csv, write_json, write_jsonl, AuditConfig, PipelineError,
    StageError,
};
use crate::acquisition::{build_pair_manifest, digest, fetch_all, load_topics, Fetcher, PairManifest};
use crate::model::{EpistemicCategory, Platform};
use crate::parsing::{parse_article, CitationRecord, ParsedArticle};
use crate::profiles::{descriptive_stats, global_profile, ArticleSize, EpistemicProfile, GlobalProfile};
use crate::taxonomy::{ClassificationResult, Classifier, ClassifierMode};

pub(crate) fn load_manifest(cfg: &AuditConfig) -> Result<PairManifest, StageError> {
    let path = cfg.layout().manifest();
    if !path.exists() {
        return Err(StageError::MissingInput(path));
    }
    Ok(PairManifest::load(&path)?)
}

/// Retrieves both versions of every included topic and writes the pair
/// manifest. Without a fetcher only the cache is consulted.
pub fn fetch(cfg: &AuditConfig, fetcher: Option<&Fetcher>) -> Result<PairManifest, PipelineError> {
    cfg.validate(true)?;
    in_stage("fetch", fetch_inner(cfg, fetcher))
}

fn fetch_inner(cfg: &AuditConfig, fetcher: Option<&Fetcher>) -> Result<PairManifest, StageError> {
    let topics: Vec<_> = load_topics(&cfg.topics)?.into_iter().filter(|t| t.include).collect();
    let cache = cfg.cache();
    let mut fetched = HashMap::new();
    match fetcher {
        Some(f) => {
            for o in fetch_all(f, &cache, &topics, cfg.max_concurrency) {
                if let Err(e) = &o.result {
                    log::warn!("{} [{}]: {e}", o.title, o.platform);
                }
                fetched.insert((o.title, o.platform), o.result.is_ok());
            }
        }
        None => {
            for t in &topics {
                for p in Platform::ALL {
                    fetched.insert((t.title.clone(), p), cache.load(p, &t.title).is_ok());
                }
            }
        }
    }
    let manifest = build_pair_manifest(&topics, &fetched, &cfg.list_rules(), Utc::now())?;
    manifest.save(&cfg.layout().manifest())?;
    log::info!(
        "manifest: {} eligible, {} missing, {} excluded",
        manifest.eligible_count,
        manifest.missing_count,
        manifest.excluded_count
    );
    Ok(manifest)
}

/// One row of `corpus.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRow {
    pub title: String,
    pub platform: Platform,
    pub word_count: u64,
    pub citation_count: u64,
    pub density_per_1k: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseFailure {
    pub title: String,
    pub platform: Platform,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseSummary {
    /// SHA-256 over the sorted `platform, title, content hash` lines of
    /// every parsed page.
    pub snapshot_digest: String,
    /// Titles parsed on both platforms, in manifest order.
    pub pairs: Vec<String>,
    pub failures: Vec<ParseFailure>,
    /// Parsed pages with an empty reference list.
    pub no_references: Vec<ParseFailure>,
}

/// Parses every eligible cached page. A pair where either side fails to
/// parse is dropped from downstream stages and listed in the summary.
pub fn parse(cfg: &AuditConfig) -> Result<ParseSummary, PipelineError> {
    in_stage("parse", parse_inner(cfg))
}

fn parse_inner(cfg: &AuditConfig) -> Result<ParseSummary, StageError> {
    let manifest = load_manifest(cfg)?;
    let cache = cfg.cache();
    let layout = cfg.layout();
    let jobs: Vec<(&str, Platform)> =
        manifest.eligible().flat_map(|e| Platform::ALL.into_iter().map(move |p| (e.title.as_str(), p))).collect();
    let results: Vec<Result<(ParsedArticle, String), ParseFailure>> = jobs
        .par_iter()
        .map(|&(title, platform)| {
            let fail = |error: String| ParseFailure { title: title.to_string(), platform, error };
            let doc = cache.load(platform, title).map_err(|e| fail(e.to_string()))?;
            let parsed = parse_article(&doc).map_err(|e| fail(e.to_string()))?;
            Ok((parsed, doc.content_hash))
        })
        .collect();

    let mut failures = Vec::new();
    let mut ok: BTreeMap<(String, Platform), (ParsedArticle, String)> = BTreeMap::new();
    for r in results {
        match r {
            Ok((a, h)) => {
                ok.insert((a.title.clone(), a.platform), (a, h));
            }
            Err(f) => {
                log::warn!("parse {} [{}]: {}", f.title, f.platform, f.error);
                failures.push(f);
            }
        }
    }
    let pairs: Vec<String> = manifest
        .eligible()
        .filter(|e| Platform::ALL.iter().all(|p| ok.contains_key(&(e.title.clone(), *p))))
        .map(|e| e.title.clone())
        .collect();

    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut no_references = Vec::new();
    for title in &pairs {
        for p in Platform::ALL {
            let (a, hash) = &ok[&(title.clone(), p)];
            write_json(&layout.parsed(p, title), a)?;
            if let Err(e) = a.require_references() {
                no_references.push(ParseFailure { title: title.clone(), platform: p, error: e.to_string() });
            }
            rows.push(CorpusRow {
                title: title.clone(),
                platform: p,
                word_count: a.word_count,
                citation_count: a.citation_count(),
                density_per_1k: a.density_per_1k(),
            });
            lines.push(format!("{}\t{}\t{}", p.slug(), title, hash));
        }
    }
    lines.sort();
    write_csv(&layout.corpus_csv(), &rows)?;
    let summary = ParseSummary { snapshot_digest: digest(lines.join("\n").as_bytes()), pairs, failures, no_references };
    write_json(&layout.parse_summary(), &summary)?;
    Ok(summary)
}

pub(crate) fn load_parsed(cfg: &AuditConfig) -> Result<(ParseSummary, Vec<ParsedArticle>), StageError> {
    let layout = cfg.layout();
    let summary: ParseSummary = read_json(&layout.parse_summary())?;
    let mut out = Vec::new();
    for t in &summary.pairs {
        for p in Platform::ALL {
            out.push(read_json(&layout.parsed(p, t))?);
        }
    }
    Ok((summary, out))
}

/// One line of `classifications.jsonl`: a label or the reason there is none.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationRecord {
    pub article: String,
    pub platform: Platform,
    pub citation_index: usize,
    pub domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<ClassificationResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyMeta {
    pub mode: ClassifierMode,
    pub model: Option<String>,
    pub manual_version: String,
    pub classified: usize,
    pub unresolved: usize,
}

pub fn classify(cfg: &AuditConfig, classifier: &Classifier) -> Result<ClassifyMeta, PipelineError> {
    in_stage("classify", classify_inner(cfg, classifier))
}

fn classify_inner(cfg: &AuditConfig, classifier: &Classifier) -> Result<ClassifyMeta, StageError> {
    let (_, articles) = load_parsed(cfg)?;
    let items: Vec<(&ParsedArticle, &CitationRecord)> =
        articles.iter().flat_map(|a| a.citations.iter().map(move |c| (a, c))).collect();
    let citations: Vec<CitationRecord> = items.iter().map(|(_, c)| (*c).clone()).collect();
    let results = classifier.classify_all(&citations);
    let mut unresolved = 0;
    let records: Vec<ClassificationRecord> = items
        .iter()
        .zip(results)
        .map(|((a, c), r)| {
            let (result, error) = match r {
                Ok(r) => (Some(r), None),
                Err(e) => {
                    unresolved += 1;
                    (None, Some(e.to_string()))
                }
            };
            ClassificationRecord {
                article: a.title.clone(),
                platform: a.platform,
                citation_index: c.index,
                domain: c.domain.clone(),
                result,
                error,
            }
        })
        .collect();
    let layout = cfg.layout();
    write_jsonl(&layout.classifications(), &records)?;
    let meta = ClassifyMeta {
        mode: classifier.mode,
        model: (classifier.mode != ClassifierMode::Rules).then(|| classifier.model_name().map(String::from)).flatten(),
        manual_version: classifier.asset.version.clone(),
        classified: records.len() - unresolved,
        unresolved,
    };
    write_json(&layout.classify_meta(), &meta)?;
    Ok(meta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmptyArticle {
    pub title: String,
    pub platform: Platform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformCoverage {
    pub citations: usize,
    pub classified: usize,
    pub unresolved: usize,
    pub exclusion_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    pub global: Vec<GlobalProfile>,
    pub coverage: BTreeMap<Platform, PlatformCoverage>,
    /// Articles with no classified citation; they get no profile.
    pub empty_articles: Vec<EmptyArticle>,
}

/// One row of the category bar-chart CSV.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct CategoryMeanRow {
    category: String,
    platform: Platform,
    mean: f64,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
}

pub fn profile(cfg: &AuditConfig) -> Result<ProfileSummary, PipelineError> {
    in_stage("profile", profile_inner(cfg))
}

pub(crate) fn sizes_from_corpus(rows: &[CorpusRow]) -> Vec<ArticleSize> {
    rows.iter()
        .map(|r| ArticleSize {
            title: r.title.clone(),
            platform: r.platform,
            word_count: r.word_count,
            citation_count: r.citation_count,
        })
        .collect()
}

fn profile_inner(cfg: &AuditConfig) -> Result<ProfileSummary, StageError> {
    let layout = cfg.layout();
    let corpus: Vec<CorpusRow> = read_csv(&layout.corpus_csv())?;
    let records: Vec<ClassificationRecord> = read_jsonl(&layout.classifications())?;

    let mut labels: HashMap<(&str, Platform), Vec<EpistemicCategory>> = HashMap::new();
    let mut coverage: BTreeMap<Platform, PlatformCoverage> = Platform::ALL
        .into_iter()
        .map(|p| (p, PlatformCoverage { citations: 0, classified: 0, unresolved: 0, exclusion_rate: None }))
        .collect();
    for r in &records {
        let cov = coverage.get_mut(&r.platform).expect("all platforms present");
        cov.citations += 1;
        match &r.result {
            Some(res) => {
                cov.classified += 1;
                labels.entry((r.article.as_str(), r.platform)).or_default().push(res.category);
            }
            None => cov.unresolved += 1,
        }
    }
    for cov in coverage.values_mut() {
        cov.exclusion_rate = (cov.citations > 0).then(|| cov.unresolved as f64 / cov.citations as f64);
    }

    let mut profiles = Vec::new();
    let mut empty_articles = Vec::new();
    for row in &corpus {
        match labels.get(&(row.title.as_str(), row.platform)) {
            Some(l) => profiles.push(EpistemicProfile::from_labels(&row.title, row.platform, l).expect("non-empty")),
            None => empty_articles.push(EmptyArticle { title: row.title.clone(), platform: row.platform }),
        }
    }
    let global: Vec<GlobalProfile> =
        Platform::ALL.into_iter().filter_map(|p| global_profile(p, &profiles).ok()).collect();
    let stats = descriptive_stats(&sizes_from_corpus(&corpus), &profiles);

    let mut bars = Vec::new();
    for (platform, s) in &stats.platforms {
        for (c, m) in &s.category_means {
            if let Some(m) = m {
                bars.push(CategoryMeanRow {
                    category: c.ident().to_string(),
                    platform: *platform,
                    mean: m.mean,
                    ci_low: Some(m.ci_low),
                    ci_high: Some(m.ci_high),
                });
            } else {
                let vals: Vec<f64> =
                    profiles.iter().filter(|p| p.platform == *platform).map(|p| p.proportions[c.index()]).collect();
                if let Some(&v) = vals.first() {
                    bars.push(CategoryMeanRow {
                        category: c.ident().to_string(),
                        platform: *platform,
                        mean: v,
                        ci_low: None,
                        ci_high: None,
                    });
                }
            }
        }
    }

    write_jsonl(&layout.profiles(), &profiles)?;
    write_json(&layout.descriptive_stats(), &stats)?;
    write_csv(&layout.category_means_csv(), &bars)?;
    let summary = ProfileSummary { global, coverage, empty_articles };
    write_json(&layout.global_profile(), &summary)?;
    Ok(summary)
}
