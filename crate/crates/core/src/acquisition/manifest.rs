//! Topic list loading and the matched-pair manifest.

use std::collections::{BTreeSet, HashMap};
use std::fs;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{cache::atomic_write, AcquisitionError, TopicEntry};
use crate::model::{Platform, TopicCategory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PairStatus {
    Fetched,
    Missing,
    ExcludedListArticle,
}

/// Title-prefix rules for list-style articles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ListRules {
    pub prefixes: Vec<String>,
}

impl Default for ListRules {
    fn default() -> Self {
        Self { prefixes: vec!["List of".into(), "Lists of".into(), "Deaths in".into()] }
    }
}

impl ListRules {
    pub fn is_list_article(&self, title: &str) -> bool {
        let t = title.trim().to_lowercase();
        self.prefixes.iter().any(|p| t.starts_with(&p.to_lowercase()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub title: String,
    pub topic_category: TopicCategory,
    pub wikipedia: PairStatus,
    pub grokipedia: PairStatus,
    pub eligible: bool,
}

impl ManifestEntry {
    pub fn status(&self, platform: Platform) -> PairStatus {
        match platform {
            Platform::Wikipedia => self.wikipedia,
            Platform::Grokipedia => self.grokipedia,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairManifest {
    pub created_at: DateTime<Utc>,
    pub entries: Vec<ManifestEntry>,
    pub eligible_count: usize,
    pub missing_count: usize,
    pub excluded_count: usize,
}

impl PairManifest {
    pub fn eligible(&self) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(|e| e.eligible)
    }

    pub fn save(&self, path: &Path) -> Result<(), AcquisitionError> {
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| AcquisitionError::io(dir, e))?;
        }
        atomic_write(path, &serde_json::to_vec_pretty(self).expect("manifest serializes"))
    }

    pub fn load(path: &Path) -> Result<Self, AcquisitionError> {
        let raw = fs::read(path).map_err(|e| AcquisitionError::io(path, e))?;
        serde_json::from_slice(&raw).map_err(|source| AcquisitionError::Metadata { path: path.into(), source })
    }
}

/// Builds the manifest from per-(title, platform) fetch success flags.
///
/// A topic absent from `fetched` on a platform counts as missing there.
/// List-style titles are excluded even when both pages were retrieved.
pub fn build_pair_manifest(
    topics: &[TopicEntry],
    fetched: &HashMap<(String, Platform), bool>,
    rules: &ListRules,
    created_at: DateTime<Utc>,
) -> Result<PairManifest, AcquisitionError> {
    let mut entries = Vec::with_capacity(topics.len());
    let (mut missing, mut excluded) = (0, 0);
    for t in topics {
        let status = |p: Platform| {
            if rules.is_list_article(&t.title) {
                PairStatus::ExcludedListArticle
            } else if fetched.get(&(t.title.clone(), p)).copied().unwrap_or(false) {
                PairStatus::Fetched
            } else {
                PairStatus::Missing
            }
        };
        let (w, g) = (status(Platform::Wikipedia), status(Platform::Grokipedia));
        let eligible = w == PairStatus::Fetched && g == PairStatus::Fetched;
        if w == PairStatus::ExcludedListArticle {
            excluded += 1;
        } else if !eligible {
            missing += 1;
        }
        entries.push(ManifestEntry {
            title: t.title.clone(),
            topic_category: t.topic_category,
            wikipedia: w,
            grokipedia: g,
            eligible,
        });
    }
    let eligible_count = entries.iter().filter(|e| e.eligible).count();
    if eligible_count == 0 {
        return Err(AcquisitionError::EmptyManifest);
    }
    Ok(PairManifest { created_at, entries, eligible_count, missing_count: missing, excluded_count: excluded })
}

#[derive(Debug, Deserialize)]
struct TopicRow {
    title: String,
    topic_category: String,
    #[serde(default)]
    include: Option<String>,
}

fn parse_bool(s: &str) -> Option<bool> {
    match s.trim().to_ascii_lowercase().as_str() {
        "" | "true" | "1" | "yes" | "y" => Some(true),
        "false" | "0" | "no" | "n" => Some(false),
        _ => None,
    }
}

/// Reads a `title,topic_category,include` CSV. Titles must be unique.
pub fn load_topics(path: &Path) -> Result<Vec<TopicEntry>, AcquisitionError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| AcquisitionError::TopicList(format!("{}: {e}", path.display())))?;
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<TopicRow>().enumerate() {
        let line = i + 2;
        let row = row.map_err(|e| AcquisitionError::TopicList(format!("line {line}: {e}")))?;
        if row.title.is_empty() {
            return Err(AcquisitionError::TopicList(format!("line {line}: empty title")));
        }
        let topic_category = row
            .topic_category
            .parse::<TopicCategory>()
            .map_err(|e| AcquisitionError::TopicList(format!("line {line}: {e}")))?;
        let include = parse_bool(row.include.as_deref().unwrap_or(""))
            .ok_or_else(|| AcquisitionError::TopicList(format!("line {line}: bad include flag")))?;
        if !seen.insert(row.title.clone()) {
            return Err(AcquisitionError::TopicList(format!("line {line}: duplicate title `{}`", row.title)));
        }
        out.push(TopicEntry { title: row.title, topic_category, include });
    }
    Ok(out)
}
