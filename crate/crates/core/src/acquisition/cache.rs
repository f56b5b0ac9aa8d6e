//! Snapshot cache: `{root}/{platform}/{slug}.html` plus a `.json` sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use super::{digest, AcquisitionError, RawDocument};
use crate::model::{slugify, Platform};

/// Sidecar stored next to each cached body.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheMeta {
    pub title: String,
    pub platform: Platform,
    pub url: String,
    pub fetched_at: DateTime<Utc>,
    pub content_hash: String,
}

#[derive(Debug, Clone)]
pub struct Cache {
    root: PathBuf,
}

impl Cache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn body_path(&self, platform: Platform, title: &str) -> PathBuf {
        self.root.join(platform.slug()).join(format!("{}.html", slugify(title)))
    }

    pub fn meta_path(&self, platform: Platform, title: &str) -> PathBuf {
        self.root.join(platform.slug()).join(format!("{}.json", slugify(title)))
    }

    pub fn contains(&self, platform: Platform, title: &str) -> bool {
        self.body_path(platform, title).is_file() && self.meta_path(platform, title).is_file()
    }

    /// Reads a cached document and checks its digest.
    pub fn load(&self, platform: Platform, title: &str) -> Result<RawDocument, AcquisitionError> {
        let miss = || AcquisitionError::CacheMiss { title: title.to_string(), platform };
        let meta_path = self.meta_path(platform, title);
        let body_path = self.body_path(platform, title);
        if !meta_path.is_file() || !body_path.is_file() {
            return Err(miss());
        }
        let meta_raw = fs::read(&meta_path).map_err(|e| AcquisitionError::io(&meta_path, e))?;
        let meta: CacheMeta = serde_json::from_slice(&meta_raw)
            .map_err(|source| AcquisitionError::Metadata { path: meta_path.clone(), source })?;
        let body = fs::read(&body_path).map_err(|e| AcquisitionError::io(&body_path, e))?;
        if digest(&body) != meta.content_hash {
            return Err(AcquisitionError::DigestMismatch { title: title.to_string(), platform });
        }
        Ok(RawDocument {
            platform,
            title: meta.title,
            fetched_at: meta.fetched_at,
            url: meta.url,
            body,
            content_hash: meta.content_hash,
        })
    }

    /// Writes body then sidecar, each via temp file + rename.
    pub fn store(&self, doc: &RawDocument) -> Result<(), AcquisitionError> {
        let dir = self.root.join(doc.platform.slug());
        fs::create_dir_all(&dir).map_err(|e| AcquisitionError::io(&dir, e))?;
        let meta = CacheMeta {
            title: doc.title.clone(),
            platform: doc.platform,
            url: doc.url.clone(),
            fetched_at: doc.fetched_at,
            content_hash: doc.content_hash.clone(),
        };
        let meta_bytes = serde_json::to_vec_pretty(&meta).expect("metadata serializes");
        atomic_write(&self.body_path(doc.platform, &doc.title), &doc.body)?;
        atomic_write(&self.meta_path(doc.platform, &doc.title), &meta_bytes)
    }
}

pub(crate) fn atomic_write(path: &Path, bytes: &[u8]) -> Result<(), AcquisitionError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| AcquisitionError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| AcquisitionError::io(tmp.path(), e))?;
    tmp.persist(path).map_err(|e| AcquisitionError::io(path, e.error))?;
    Ok(())
}

/// Loads a cached document without touching the network.
pub fn load_cached(topic: &str, platform: Platform, cache_dir: &Path) -> Result<RawDocument, AcquisitionError> {
    Cache::new(cache_dir).load(platform, topic)
}
