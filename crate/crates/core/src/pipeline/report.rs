//! Canonical report assembly and the plain-text summary.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::analysis::{Analysis, DivergenceRow};
use super::stages::{load_manifest, ClassifyMeta, ParseSummary, ProfileSummary};
use super::{in_stage, read_json, read_jsonl, write_bytes, AuditConfig, PipelineError, StageError};
use crate::model::{EpistemicCategory, Platform};
use crate::profiles::{DescriptiveStats, EpistemicProfile};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
const SIG_DIGITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub tool_version: String,
    pub manual_version: String,
    pub classifier_mode: String,
    pub model: Option<String>,
    pub seeds: BTreeMap<String, u64>,
    pub generated_at: String,
    pub snapshot_digest: String,
}

/// The final report. Every section is a JSON object carrying the
/// snapshot digest; floats are already rounded to six significant digits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub provenance: Provenance,
    pub sections: BTreeMap<String, Value>,
}

impl AuditReport {
    pub fn section(&self, name: &str) -> Option<&Value> {
        self.sections.get(name)
    }
}

/// Rounds to `sig` significant digits through decimal formatting.
pub fn round_sig(x: f64, sig: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", sig.saturating_sub(1), x).parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let r = round_sig(n.as_f64().expect("f64 number"), SIG_DIGITS);
            *v = serde_json::Number::from_f64(r).map(Value::Number).unwrap_or(Value::Null);
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

fn section<T: Serialize>(data: &T, digest: &str) -> Value {
    let mut v = serde_json::to_value(data).expect("report data serializes");
    if !v.is_object() {
        v = json!({ "data": v });
    }
    v.as_object_mut().expect("object").insert("snapshot_digest".into(), Value::String(digest.into()));
    round_value(&mut v);
    v
}

/// Pretty JSON with object keys sorted at every level.
pub fn canonical_json(v: &Value) -> String {
    let mut out = String::new();
    write_canonical(v, 0, &mut out);
    out.push('\n');
    out
}

fn write_canonical(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize| "  ".repeat(n);
    match v {
        Value::Object(o) if !o.is_empty() => {
            let mut keys: Vec<&String> = o.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_canonical(&o[*k], indent + 1, out);
                if i + 1 < keys.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
        Value::Array(a) if !a.is_empty() => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_canonical(x, indent + 1, out);
                if i + 1 < a.len() {
                    out.push(',');
                }
                out.push('\n');
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        other => out.push_str(&other.to_string()),
    }
}

/// Assembles the report from the stage outputs on disk.
pub fn report(cfg: &AuditConfig) -> Result<AuditReport, PipelineError> {
    in_stage("report", report_inner(cfg))
}

fn report_inner(cfg: &AuditConfig) -> Result<AuditReport, StageError> {
    let layout = cfg.layout();
    let manifest = load_manifest(cfg)?;
    let parse: ParseSummary = read_json(&layout.parse_summary())?;
    let meta: ClassifyMeta = read_json(&layout.classify_meta())?;
    let profile: ProfileSummary = read_json(&layout.global_profile())?;
    let stats: DescriptiveStats = read_json(&layout.descriptive_stats())?;
    let profiles: Vec<EpistemicProfile> = read_jsonl(&layout.profiles())?;
    let analysis: Analysis = read_json(&layout.analysis())?;
    let digest = parse.snapshot_digest.as_str();

    let mut sections = BTreeMap::new();
    let statuses: Vec<Value> = manifest
        .entries
        .iter()
        .map(|e| {
            json!({
                "title": e.title,
                "topic_category": e.topic_category,
                "wikipedia": e.wikipedia,
                "grokipedia": e.grokipedia,
                "eligible": e.eligible,
            })
        })
        .collect();
    sections.insert(
        "corpus".to_string(),
        section(
            &json!({
                "topics": manifest.entries.len(),
                "eligible": manifest.eligible_count,
                "missing": manifest.missing_count,
                "excluded": manifest.excluded_count,
                "entries": statuses,
                "analyzed_pairs": parse.pairs,
                "parse_failures": parse.failures,
                "no_references": parse.no_references,
            }),
            digest,
        ),
    );
    sections.insert("classification".into(), section(&meta, digest));
    sections.insert("descriptive_stats".into(), section(&stats, digest));
    sections.insert(
        "profiles".into(),
        section(
            &json!({
                "global": profile.global,
                "coverage": profile.coverage,
                "empty_articles": profile.empty_articles,
                "articles": profiles,
            }),
            digest,
        ),
    );
    sections.insert("divergence".into(), section(&json!({ "articles": analysis.divergence }), digest));
    sections.insert("topic_metrics".into(), section(&analysis.topic_metrics, digest));
    sections.insert(
        "networks".into(),
        section(&json!({ "platforms": analysis.networks, "assortativity_sensitivity": analysis.sensitivity }), digest),
    );
    sections.insert(
        "scaling".into(),
        section(
            &json!({
                "platforms": analysis.scaling,
                "extremes": analysis.extremes,
                "extremes_note": analysis.extremes_note,
            }),
            digest,
        ),
    );
    if layout.agreement().exists() {
        let agreement: Value = read_json(&layout.agreement())?;
        sections.insert("agreement".into(), section(&agreement, digest));
    }

    Ok(AuditReport {
        provenance: Provenance {
            tool_version: TOOL_VERSION.to_string(),
            manual_version: meta.manual_version.clone(),
            classifier_mode: serde_json::to_value(meta.mode)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default(),
            model: meta.model.clone(),
            seeds: cfg.seeds.clone(),
            generated_at: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
            snapshot_digest: digest.to_string(),
        },
        sections,
    })
}

/// Writes `report.json` (canonical) and `summary.txt`, each atomically.
pub fn emit_report(cfg: &AuditConfig, r: &AuditReport) -> Result<(), PipelineError> {
    in_stage("report", emit_inner(cfg, r))
}

fn emit_inner(cfg: &AuditConfig, r: &AuditReport) -> Result<(), StageError> {
    let layout = cfg.layout();
    let value = serde_json::to_value(r).map_err(|source| StageError::Json { path: layout.report(), source })?;
    write_bytes(&layout.report(), canonical_json(&value).as_bytes())?;
    write_bytes(&layout.summary(), render_summary(r).as_bytes())
}

fn fmt_opt(v: Option<f64>, prec: usize) -> String {
    v.map(|x| format!("{x:.prec$}")).unwrap_or_else(|| "n/a".into())
}

/// Plain-text digest of the headline tables.
pub fn render_summary(r: &AuditReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Citation audit summary");
    let _ = writeln!(s, "snapshot {}", r.provenance.snapshot_digest);
    let _ = writeln!(
        s,
        "classifier {} (manual {}), tool {}",
        r.provenance.classifier_mode, r.provenance.manual_version, r.provenance.tool_version
    );
    if let Some(c) = r.section("corpus") {
        let _ = writeln!(
            s,
            "topics {}, eligible {}, missing {}, excluded {}",
            c["topics"], c["eligible"], c["missing"], c["excluded"]
        );
    }

    let _ = writeln!(s, "\nArticle size, mean (sd)");
    let _ = writeln!(s, "{:<12} {:>6} {:>22} {:>20} {:>18}", "platform", "n", "words", "citations", "per 1k words");
    if let Some(stats) =
        r.section("descriptive_stats").and_then(|v| serde_json::from_value::<DescriptiveStats>(v.clone()).ok())
    {
        for (p, st) in &stats.platforms {
            let ms = |m: &Option<crate::profiles::MeanSd>, prec: usize| match m {
                Some(m) => format!("{} ({})", fmt_opt(Some(m.mean), prec), fmt_opt(m.sd, prec)),
                None => "n/a".into(),
            };
            let _ = writeln!(
                s,
                "{:<12} {:>6} {:>22} {:>20} {:>18}",
                p.display_name(),
                st.articles,
                ms(&st.word_count, 1),
                ms(&st.citation_count, 1),
                ms(&st.density_per_1k, 1)
            );
        }
    }

    let _ = writeln!(s, "\nCorpus-wide category shares, count (%)");
    let globals: Vec<crate::profiles::GlobalProfile> = r
        .section("profiles")
        .and_then(|v| serde_json::from_value(v["global"].clone()).ok())
        .unwrap_or_default();
    let _ = write!(s, "{:<34}", "category");
    for g in &globals {
        let _ = write!(s, " {:>20}", g.platform.display_name());
    }
    s.push('\n');
    for c in EpistemicCategory::by_code() {
        let _ = write!(s, "{:<34}", c.name());
        for g in &globals {
            let _ = write!(s, " {:>20}", format!("{} ({:.2})", g.counts[c.index()], g.percent_of(c)));
        }
        s.push('\n');
    }
    let _ = write!(s, "{:<34}", "total");
    for g in &globals {
        let _ = write!(s, " {:>20}", g.total);
    }
    s.push('\n');

    let rows: Vec<DivergenceRow> = r
        .section("divergence")
        .and_then(|v| serde_json::from_value(v["articles"].clone()).ok())
        .unwrap_or_default();
    let mut sorted: Vec<&DivergenceRow> = rows.iter().collect();
    sorted.sort_by(|a, b| b.jsd.total_cmp(&a.jsd).then_with(|| a.title.cmp(&b.title)));
    let list = |s: &mut String, head: &str, items: Vec<&&DivergenceRow>| {
        let _ = writeln!(s, "\n{head}");
        for (i, d) in items.iter().enumerate() {
            let _ = writeln!(s, "{:>2}. {:<40} {:<24} JSD {:.4}", i + 1, d.title, d.topic.code(), d.jsd);
        }
    };
    list(&mut s, "Most divergent pairs", sorted.iter().take(8).collect());
    list(&mut s, "Least divergent pairs", sorted.iter().rev().take(8).collect());

    if let Some(n) = r.section("networks") {
        let _ = writeln!(s, "\nTopic assortativity");
        if let Some(rows) = n["assortativity_sensitivity"].as_array() {
            for row in rows {
                let p: Option<Platform> = serde_json::from_value(row["platform"].clone()).ok();
                let _ = writeln!(
                    s,
                    "  threshold {} {:<11} r = {}",
                    row["threshold"],
                    p.map(|p| p.display_name()).unwrap_or("?"),
                    row["r"].as_f64().map(|r| format!("{r:.3}")).unwrap_or_else(|| "n/a".into())
                );
            }
        }
    }
    s
}
