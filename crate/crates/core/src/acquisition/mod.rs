//! Harvesting article pages from both platforms: topic lists, an on-disk
//! snapshot cache, a polite HTTP fetcher and the matched-pair manifest.

mod cache;
mod fetch;
mod manifest;

use std::path::PathBuf;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Platform, TopicCategory};

pub use cache::{load_cached, Cache, CacheMeta};
pub use fetch::{fetch_article, fetch_all, FetchOutcome, FetchPolicy, Fetcher, RateLimiter};
pub use manifest::{
    build_pair_manifest, load_topics, ListRules, ManifestEntry, PairManifest, PairStatus,
};

#[derive(Debug, Error)]
pub enum AcquisitionError {
    #[error("network error fetching {url}: {reason}")]
    NetworkError { url: String, reason: String },
    #[error("{url} not found (HTTP 404)")]
    NotFound { url: String },
    #[error("{url} still rate limited after {attempts} attempts")]
    RateLimited { url: String, attempts: u32 },
    #[error("no cache entry for `{title}` on {platform}")]
    CacheMiss { title: String, platform: Platform },
    #[error("cached body for `{title}` on {platform} does not match its stored digest")]
    DigestMismatch { title: String, platform: Platform },
    #[error("no analysis-eligible pairs remain")]
    EmptyManifest,
    #[error("topic title must be non-empty")]
    EmptyTopic,
    #[error("topic list: {0}")]
    TopicList(String),
    #[error("I/O error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cache metadata at {path}: {source}")]
    Metadata {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

impl AcquisitionError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        AcquisitionError::Io { path: path.into(), source }
    }
}

/// One line of the topic list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicEntry {
    pub title: String,
    pub topic_category: TopicCategory,
    pub include: bool,
}

/// A fetched (or cached) page body with its provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub platform: Platform,
    pub title: String,
    pub fetched_at: DateTime<Utc>,
    pub url: String,
    pub body: Vec<u8>,
    pub content_hash: String,
}

impl RawDocument {
    pub fn new(platform: Platform, title: &str, url: &str, body: Vec<u8>, fetched_at: DateTime<Utc>) -> Self {
        let content_hash = digest(&body);
        Self { platform, title: title.to_string(), fetched_at, url: url.to_string(), body, content_hash }
    }

    pub fn body_str(&self) -> std::borrow::Cow<'_, str> {
        String::from_utf8_lossy(&self.body)
    }
}

/// Lowercase hex SHA-256.
pub fn digest(bytes: &[u8]) -> String {
    use sha2::{Digest, Sha256};
    hex::encode(Sha256::digest(bytes))
}
