//! Divergence, topic, network and scaling analyses over the profiled corpus.
//!
//! Small corpora cannot support every test; a method that cannot run
//! records its reason in a `note` field instead of failing the stage.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::stages::{load_manifest, CorpusRow};
use super::{in_stage, read_csv, read_json, read_jsonl, write_csv, write_json, AuditConfig, PipelineError, StageError};
use crate::divergence::{
    cosine_similarity, jensen_shannon_divergence, kruskal_wallis, paired_cohens_d, shannon_entropy, EffectSize,
    HTestResult, SimplexVector,
};
use crate::model::{Platform, TopicCategory};
use crate::networks::{
    assortativity, category_cosine_backbone, co_occurrence_graph, homophily_graph, mean_filter_backbone,
    mixing_matrix, ArticleGraph, Backbone, CategoryGraph, CosineBackbone, MixingMatrix, ProfiledArticle,
};
use crate::profiles::EpistemicProfile;
use crate::scaling::{
    binned_density, rank_extremes_report, select_scaling_model, CitationVolume, DensityBin, ExtremesReport,
    ModelSelection,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DivergenceRow {
    pub title: String,
    pub topic: TopicCategory,
    pub jsd: f64,
    pub cosine: f64,
    pub entropy_wikipedia: f64,
    pub entropy_grokipedia: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicSummary {
    pub topic: TopicCategory,
    pub n: usize,
    pub mean_jsd: Option<f64>,
    pub mean_entropy_wikipedia: Option<f64>,
    pub mean_entropy_grokipedia: Option<f64>,
    /// Paired d on entropy, Grokipedia minus Wikipedia.
    pub entropy_effect: Option<EffectSize>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopicMetrics {
    pub topics: Vec<TopicSummary>,
    pub overall_entropy_effect: Option<EffectSize>,
    pub overall_note: Option<String>,
    /// Kruskal-Wallis on per-article JSD grouped by topic.
    pub jsd_by_topic: Option<HTestResult>,
    pub jsd_by_topic_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensitivityRow {
    pub threshold: f64,
    pub platform: Platform,
    pub edges: usize,
    pub r: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkSummary {
    pub co_occurrence: CategoryGraph,
    pub co_occurrence_backbone: Option<Backbone>,
    pub co_occurrence_note: Option<String>,
    pub cosine: Option<CosineBackbone>,
    pub cosine_note: Option<String>,
    pub homophily: Option<ArticleGraph>,
    pub mixing: Option<MixingMatrix>,
    pub homophily_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformScaling {
    pub selection: Option<ModelSelection>,
    pub note: Option<String>,
    pub density_bins: Vec<DensityBin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub divergence: Vec<DivergenceRow>,
    pub topic_metrics: TopicMetrics,
    pub networks: BTreeMap<Platform, NetworkSummary>,
    pub sensitivity: Vec<SensitivityRow>,
    pub scaling: BTreeMap<Platform, PlatformScaling>,
    pub extremes: Option<ExtremesReport>,
    pub extremes_note: Option<String>,
}

pub fn analyze(cfg: &AuditConfig) -> Result<Analysis, PipelineError> {
    cfg.validate(false)?;
    in_stage("analyze", analyze_inner(cfg))
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn analyze_inner(cfg: &AuditConfig) -> Result<Analysis, StageError> {
    let layout = cfg.layout();
    let manifest = load_manifest(cfg)?;
    let topic_of: HashMap<&str, TopicCategory> =
        manifest.entries.iter().map(|e| (e.title.as_str(), e.topic_category)).collect();
    let profiles: Vec<EpistemicProfile> = read_jsonl(&layout.profiles())?;
    let corpus: Vec<CorpusRow> = read_csv(&layout.corpus_csv())?;
    // make sure the profile stage ran to completion
    let _: serde_json::Value = read_json(&layout.global_profile())?;

    let by_key: HashMap<(&str, Platform), &EpistemicProfile> =
        profiles.iter().map(|p| ((p.article.as_str(), p.platform), p)).collect();
    let mut titles: Vec<&str> = Vec::new();
    for p in &profiles {
        if !titles.contains(&p.article.as_str()) {
            titles.push(&p.article);
        }
    }

    // paired articles: both sides profiled
    let mut divergence = Vec::new();
    for t in &titles {
        let (Some(w), Some(g)) = (by_key.get(&(*t, Platform::Wikipedia)), by_key.get(&(*t, Platform::Grokipedia)))
        else {
            continue;
        };
        let Some(topic) = topic_of.get(t) else { continue };
        let pw = SimplexVector::new(w.proportions.to_vec()).expect("profile proportions sum to one");
        let pg = SimplexVector::new(g.proportions.to_vec()).expect("profile proportions sum to one");
        divergence.push(DivergenceRow {
            title: t.to_string(),
            topic: *topic,
            jsd: jensen_shannon_divergence(&pw, &pg).expect("equal lengths"),
            cosine: cosine_similarity(&w.proportions, &g.proportions).expect("non-zero profiles"),
            entropy_wikipedia: shannon_entropy(&pw),
            entropy_grokipedia: shannon_entropy(&pg),
        });
    }

    let topic_metrics = topic_metrics(&divergence);

    let paired_owned: Vec<String> = divergence.iter().map(|d| d.title.clone()).collect();
    let paired: Vec<&str> = paired_owned.iter().map(String::as_str).collect();
    let mut networks = BTreeMap::new();
    let mut sensitivity = Vec::new();
    for platform in Platform::ALL {
        let profs: Vec<&EpistemicProfile> = paired.iter().map(|t| by_key[&(*t, platform)]).collect();
        let articles: Vec<ProfiledArticle> = profs
            .iter()
            .map(|p| (p.article.clone(), topic_of[p.article.as_str()], p.proportions))
            .collect();
        let co = co_occurrence_graph(&profs);
        let (co_bb, co_note) = split(mean_filter_backbone(&co));
        let (cosine, cosine_note) = split(category_cosine_backbone(&profs));
        let (homophily, mixing, homophily_note) = match homophily_graph(&articles, cfg.homophily_threshold) {
            Ok(g) => {
                let (m, note) = split(mixing_matrix(&g));
                (Some(g), m, note)
            }
            Err(e) => (None, None, Some(e.to_string())),
        };
        networks.insert(
            platform,
            NetworkSummary {
                co_occurrence: co,
                co_occurrence_backbone: co_bb,
                co_occurrence_note: co_note,
                cosine,
                cosine_note,
                homophily,
                mixing,
                homophily_note,
            },
        );
        for &t in &cfg.sensitivity_thresholds {
            let row = match homophily_graph(&articles, t) {
                Ok(g) => match assortativity(&g) {
                    Ok(a) => SensitivityRow { threshold: t, platform, edges: g.edges.len(), r: Some(a.r), degenerate: a.degenerate },
                    Err(_) => SensitivityRow { threshold: t, platform, edges: 0, r: None, degenerate: true },
                },
                Err(_) => SensitivityRow { threshold: t, platform, edges: 0, r: None, degenerate: true },
            };
            sensitivity.push(row);
        }
    }

    let in_pairs = |r: &&CorpusRow| paired.contains(&r.title.as_str());
    let mut scaling = BTreeMap::new();
    for platform in Platform::ALL {
        let rows: Vec<&CorpusRow> = corpus.iter().filter(in_pairs).filter(|r| r.platform == platform).collect();
        let x: Vec<f64> = rows.iter().map(|r| r.word_count as f64).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.citation_count as f64).collect();
        let (selection, note) = split(select_scaling_model(&x, &y, cfg.alpha));
        scaling.insert(
            platform,
            PlatformScaling { selection, note, density_bins: binned_density(&x, &y, cfg.density_bin_words) },
        );
    }

    let volumes: Vec<CitationVolume> = corpus
        .iter()
        .filter(in_pairs)
        .map(|r| CitationVolume {
            title: r.title.clone(),
            platform: r.platform,
            topic: topic_of[r.title.as_str()],
            citations: r.citation_count,
        })
        .collect();
    // the report's k is capped at half the paired corpus
    let k = cfg.extremes_k.min(paired.len() / 2);
    let (extremes, extremes_note) = if k == 0 {
        (None, Some(format!("{} paired articles; extremes need at least 2", paired.len())))
    } else {
        let (r, mut note) = split(rank_extremes_report(&volumes, k));
        if k < cfg.extremes_k && note.is_none() {
            note = Some(format!("k reduced from {} to {k} for a corpus of {}", cfg.extremes_k, paired.len()));
        }
        (r, note)
    };

    let analysis =
        Analysis { divergence, topic_metrics, networks, sensitivity, scaling, extremes, extremes_note };
    write_outputs(cfg, &analysis, &corpus, &paired)?;
    Ok(analysis)
}

fn split<T, E: std::fmt::Display>(r: Result<T, E>) -> (Option<T>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

fn topic_metrics(rows: &[DivergenceRow]) -> TopicMetrics {
    let mut topics = Vec::new();
    let mut groups = Vec::new();
    for topic in TopicCategory::ALL {
        let rs: Vec<&DivergenceRow> = rows.iter().filter(|r| r.topic == topic).collect();
        let jsd: Vec<f64> = rs.iter().map(|r| r.jsd).collect();
        let ew: Vec<f64> = rs.iter().map(|r| r.entropy_wikipedia).collect();
        let eg: Vec<f64> = rs.iter().map(|r| r.entropy_grokipedia).collect();
        let diffs: Vec<f64> = rs.iter().map(|r| r.entropy_grokipedia - r.entropy_wikipedia).collect();
        let (entropy_effect, note) = split(paired_cohens_d(&diffs));
        if !jsd.is_empty() {
            groups.push(jsd.clone());
        }
        topics.push(TopicSummary {
            topic,
            n: rs.len(),
            mean_jsd: mean(&jsd),
            mean_entropy_wikipedia: mean(&ew),
            mean_entropy_grokipedia: mean(&eg),
            entropy_effect,
            note,
        });
    }
    let diffs: Vec<f64> = rows.iter().map(|r| r.entropy_grokipedia - r.entropy_wikipedia).collect();
    let (overall_entropy_effect, overall_note) = split(paired_cohens_d(&diffs));
    let (jsd_by_topic, jsd_by_topic_note) = split(kruskal_wallis(&groups));
    TopicMetrics { topics, overall_entropy_effect, overall_note, jsd_by_topic, jsd_by_topic_note }
}

#[derive(Serialize)]
struct DivergenceCsv<'a> {
    title: &'a str,
    topic: &'static str,
    jsd: f64,
    cosine: f64,
}

#[derive(Serialize)]
struct CategoryEdgeCsv {
    source: &'static str,
    target: &'static str,
    weight: f64,
}

#[derive(Serialize)]
struct ArticleEdgeCsv<'a> {
    source: &'a str,
    target: &'a str,
    weight: f64,
}

#[derive(Serialize)]
struct ScatterCsv<'a> {
    title: &'a str,
    platform: Platform,
    words: u64,
    citations: u64,
}

#[derive(Serialize)]
struct ExtremesCsv<'a> {
    platform: Platform,
    end: &'static str,
    rank: usize,
    title: &'a str,
    topic: &'static str,
    citations: u64,
}

fn edge_rows(g: &CategoryGraph) -> Vec<CategoryEdgeCsv> {
    g.edges
        .iter()
        .map(|e| CategoryEdgeCsv { source: e.source.ident(), target: e.target.ident(), weight: e.weight })
        .collect()
}

fn write_outputs(cfg: &AuditConfig, a: &Analysis, corpus: &[CorpusRow], paired: &[&str]) -> Result<(), StageError> {
    let layout = cfg.layout();
    let div: Vec<DivergenceCsv> = a
        .divergence
        .iter()
        .map(|r| DivergenceCsv { title: &r.title, topic: r.topic.code(), jsd: r.jsd, cosine: r.cosine })
        .collect();
    write_csv(&layout.divergence_csv(), &div)?;
    write_json(&layout.topic_metrics(), &a.topic_metrics)?;

    let net = layout.networks_dir();
    for (platform, n) in &a.networks {
        let slug = platform.slug();
        write_json(&net.join(format!("{slug}_network.json")), n)?;
        write_csv(&net.join(format!("{slug}_cooccurrence_full.csv")), &edge_rows(&n.co_occurrence))?;
        if let Some(b) = &n.co_occurrence_backbone {
            write_csv(&net.join(format!("{slug}_cooccurrence_filtered.csv")), &edge_rows(&b.filtered))?;
        }
        if let Some(c) = &n.cosine {
            write_csv(&net.join(format!("{slug}_cosine_full.csv")), &edge_rows(&c.backbone.full))?;
            write_csv(&net.join(format!("{slug}_cosine_filtered.csv")), &edge_rows(&c.backbone.filtered))?;
        }
        if let Some(g) = &n.homophily {
            let rows: Vec<ArticleEdgeCsv> = g
                .edges
                .iter()
                .map(|e| ArticleEdgeCsv {
                    source: &g.nodes[e.source].id,
                    target: &g.nodes[e.target].id,
                    weight: e.similarity,
                })
                .collect();
            write_csv(&net.join(format!("{slug}_homophily_edges.csv")), &rows)?;
        }
        if let Some(m) = &n.mixing {
            let mut rows = Vec::new();
            for (i, from) in m.topics.iter().enumerate() {
                for (j, to) in m.topics.iter().enumerate() {
                    rows.push(MixingCsv {
                        from: from.code(),
                        to: to.code(),
                        count: m.counts[i][j],
                        probability: m.probs[i].as_ref().map(|p| p[j]),
                    });
                }
            }
            write_csv(&net.join(format!("{slug}_mixing.csv")), &rows)?;
        }
    }
    #[derive(Serialize)]
    struct SensCsv {
        threshold: f64,
        platform: Platform,
        r: Option<f64>,
    }
    let sens: Vec<SensCsv> =
        a.sensitivity.iter().map(|s| SensCsv { threshold: s.threshold, platform: s.platform, r: s.r }).collect();
    write_csv(&layout.assortativity_csv(), &sens)?;

    write_json(&layout.scaling(), &a.scaling)?;
    let scatter: Vec<ScatterCsv> = corpus
        .iter()
        .filter(|r| paired.contains(&r.title.as_str()))
        .map(|r| ScatterCsv { title: &r.title, platform: r.platform, words: r.word_count, citations: r.citation_count })
        .collect();
    write_csv(&layout.scatter_csv(), &scatter)?;
    let mut ext = Vec::new();
    if let Some(e) = &a.extremes {
        for (platform, pe) in &e.platforms {
            for (end, rows) in [("top", &pe.top), ("bottom", &pe.bottom)] {
                for (i, r) in rows.iter().enumerate() {
                    ext.push(ExtremesCsv {
                        platform: *platform,
                        end,
                        rank: i + 1,
                        title: &r.title,
                        topic: r.topic.code(),
                        citations: r.citations,
                    });
                }
            }
        }
    }
    write_csv(&layout.extremes_csv(), &ext)?;
    write_json(&layout.analysis(), a)
}

#[derive(Serialize)]
struct MixingCsv {
    from: &'static str,
    to: &'static str,
    count: f64,
    probability: Option<f64>,
}
