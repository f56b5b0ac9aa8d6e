//! Work resolvers for the look-through branch of step 7.

use std::collections::HashMap;
use std::sync::Arc;

use scraper::{Html, Selector};

use crate::acquisition::{Cache, Fetcher};
use crate::model::Platform;
use crate::parsing::{normalize_ws, CitationRecord};

/// What a tertiary page is about.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Resolution {
    /// The page covers one citable work; the record describes that work.
    SpecificWork(CitationRecord),
    GeneralTopic,
}

pub trait WorkResolver: Send + Sync {
    fn resolve(&self, c: &CitationRecord) -> Resolution;
}

/// Treats every tertiary page as a general topic.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoLookThrough;

impl WorkResolver for NoLookThrough {
    fn resolve(&self, _: &CitationRecord) -> Resolution {
        Resolution::GeneralTopic
    }
}

/// Fixed map from a citation's first URL (or its text when it has no
/// URL) to a resolution. Unknown keys resolve to a general topic.
#[derive(Debug, Clone, Default)]
pub struct FixtureResolver {
    map: HashMap<String, Resolution>,
}

impl FixtureResolver {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, resolution: Resolution) -> Self {
        self.map.insert(key.to_string(), resolution);
        self
    }

    fn key(c: &CitationRecord) -> &str {
        c.first_url().unwrap_or(&c.raw_text)
    }
}

impl WorkResolver for FixtureResolver {
    fn resolve(&self, c: &CitationRecord) -> Resolution {
        self.map.get(Self::key(c)).cloned().unwrap_or(Resolution::GeneralTopic)
    }
}

const WORK_FIELDS: &[&str] =
    &["author", "authors", "publisher", "published", "publication date", "isbn", "doi", "journal", "editor", "language"];

/// Looks up the cited encyclopedia page in the snapshot cache (fetching
/// it when a fetcher is supplied) and treats pages whose infobox carries
/// bibliographic fields as being about a specific work.
pub struct CacheWorkResolver {
    cache: Cache,
    fetcher: Option<Arc<Fetcher>>,
}

impl CacheWorkResolver {
    pub fn new(cache: Cache, fetcher: Option<Arc<Fetcher>>) -> Self {
        Self { cache, fetcher }
    }

    fn title_of(url: &url::Url) -> Option<(Platform, String)> {
        let host = url.host_str()?.to_ascii_lowercase();
        let platform = if host.ends_with("wikipedia.org") {
            Platform::Wikipedia
        } else if host.ends_with("grokipedia.com") {
            Platform::Grokipedia
        } else {
            return None;
        };
        let mut segs = url.path_segments()?;
        let prefix = segs.next()?;
        if prefix != "wiki" && prefix != "page" {
            return None;
        }
        let raw: String = segs.collect::<Vec<_>>().join("/");
        let decoded = url::form_urlencoded::parse(format!("t={raw}").as_bytes())
            .next()
            .map(|(_, v)| v.into_owned())
            .unwrap_or(raw);
        Some((platform, decoded.replace('_', " ")))
    }
}

/// Pulls the bibliographic infobox rows out of a MediaWiki page.
pub fn describe_work(title: &str, html: &str) -> Option<CitationRecord> {
    let doc = Html::parse_document(html);
    let infobox = doc.select(&Selector::parse("table.infobox").expect("static selector")).next()?;
    let row = Selector::parse("tr").expect("static selector");
    let th = Selector::parse("th").expect("static selector");
    let td = Selector::parse("td").expect("static selector");
    let link = Selector::parse("a[href^='http']").expect("static selector");
    let mut fields = Vec::new();
    let mut urls = Vec::new();
    for r in infobox.select(&row) {
        let (Some(h), Some(d)) = (r.select(&th).next(), r.select(&td).next()) else { continue };
        let label = normalize_ws(&h.text().collect::<String>());
        let value = normalize_ws(&d.text().collect::<String>());
        if WORK_FIELDS.contains(&label.to_ascii_lowercase().as_str()) {
            fields.push(format!("{label}: {value}"));
            urls.extend(d.select(&link).filter_map(|a| a.value().attr("href").map(String::from)));
        }
    }
    let bibliographic = fields.iter().any(|f| {
        let l = f.to_ascii_lowercase();
        ["author", "publisher", "isbn", "doi", "journal"].iter().any(|k| l.starts_with(k))
    });
    if !bibliographic {
        return None;
    }
    let raw = format!("{title}. {}", fields.join("; "));
    Some(CitationRecord::new(0, &raw, urls, Some(title.to_string())))
}

impl WorkResolver for CacheWorkResolver {
    fn resolve(&self, c: &CitationRecord) -> Resolution {
        let Some((platform, title)) = c.first_url().and_then(|u| url::Url::parse(u).ok()).and_then(|u| Self::title_of(&u))
        else {
            return Resolution::GeneralTopic;
        };
        let doc = match &self.fetcher {
            Some(f) => f.fetch(&title, platform, &self.cache).map(|(d, _)| d).ok(),
            None => self.cache.load(platform, &title).ok(),
        };
        match doc.and_then(|d| describe_work(&title, &d.body_str())) {
            Some(work) => Resolution::SpecificWork(work),
            None => Resolution::GeneralTopic,
        }
    }
}
