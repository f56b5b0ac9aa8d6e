//! HTML to [`ParsedArticle`]: citation extraction and reference-free word
//! counts, one parser per platform with a shared output schema.

mod grokipedia;
mod wikipedia;

use std::collections::HashSet;

use ego_tree::NodeId;
use scraper::node::Node;
use scraper::ElementRef;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::acquisition::RawDocument;
use crate::model::Platform;

pub use grokipedia::parse_grokipedia_article;
pub use wikipedia::parse_wikipedia_article;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("`{title}`: content root `{selector}` not found")]
    ContentRootMissing { title: String, selector: &'static str },
    #[error("`{0}` has no citations")]
    NoReferences(String),
    #[error("document is from {found}, expected {expected}")]
    WrongPlatform { expected: Platform, found: Platform },
}

/// One reference-list entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CitationRecord {
    pub index: usize,
    pub raw_text: String,
    pub urls: Vec<String>,
    pub domain: Option<String>,
    pub anchor_title: Option<String>,
}

impl CitationRecord {
    /// Builds a record from text and URLs; the domain comes from the first URL.
    pub fn new(index: usize, raw_text: &str, urls: Vec<String>, anchor_title: Option<String>) -> Self {
        let domain = urls.first().and_then(|u| registrable_domain(u));
        Self { index, raw_text: normalize_ws(raw_text), urls, domain, anchor_title }
    }

    pub fn first_url(&self) -> Option<&str> {
        self.urls.first().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedArticle {
    pub platform: Platform,
    pub title: String,
    pub word_count: u64,
    pub citations: Vec<CitationRecord>,
}

impl ParsedArticle {
    pub fn citation_count(&self) -> u64 {
        self.citations.len() as u64
    }

    pub fn density_per_1k(&self) -> Option<f64> {
        (self.word_count > 0).then(|| self.citation_count() as f64 / self.word_count as f64 * 1000.0)
    }

    /// Errors with `NoReferences` for articles that extracted no citations.
    pub fn require_references(&self) -> Result<(), ParseError> {
        if self.citations.is_empty() {
            Err(ParseError::NoReferences(self.title.clone()))
        } else {
            Ok(())
        }
    }
}

/// Dispatches on the document's platform.
pub fn parse_article(doc: &RawDocument) -> Result<ParsedArticle, ParseError> {
    match doc.platform {
        Platform::Wikipedia => parse_wikipedia_article(doc),
        Platform::Grokipedia => parse_grokipedia_article(doc),
    }
}

/// Number of maximal non-whitespace runs.
pub fn count_words(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Lowercase registrable domain (eTLD+1) of a URL's host.
pub fn registrable_domain(url: &str) -> Option<String> {
    let parsed = url::Url::parse(url).ok()?;
    let host = parsed.host_str()?.trim_end_matches('.').to_ascii_lowercase();
    if parsed.host().is_some_and(|h| !matches!(h, url::Host::Domain(_))) {
        return Some(host);
    }
    match psl::domain_str(&host) {
        Some(d) => Some(d.to_string()),
        None => Some(host),
    }
}

const BLOCK_TAGS: &[&str] = &[
    "p", "div", "br", "li", "ul", "ol", "dl", "dt", "dd", "h1", "h2", "h3", "h4", "h5", "h6", "table", "tr", "td",
    "th", "section", "article", "blockquote", "pre", "figure", "figcaption", "header", "footer", "nav", "aside",
];

/// Concatenated text under `root`, skipping `script`/`style` and any
/// subtree whose id is in `skip`. Block elements are separated by a space
/// so adjacent paragraphs do not fuse into one token.
pub(crate) fn visible_text(root: ElementRef<'_>, skip: &HashSet<NodeId>) -> String {
    let mut out = String::new();
    collect_text(*root, skip, &mut out);
    out
}

fn collect_text(node: ego_tree::NodeRef<'_, Node>, skip: &HashSet<NodeId>, out: &mut String) {
    for child in node.children() {
        if skip.contains(&child.id()) {
            continue;
        }
        match child.value() {
            Node::Text(t) => out.push_str(t),
            Node::Element(e) => {
                let name = e.name();
                if matches!(name, "script" | "style" | "noscript" | "template") {
                    continue;
                }
                let block = BLOCK_TAGS.contains(&name);
                if block {
                    out.push(' ');
                }
                collect_text(child, skip, out);
                if block {
                    out.push(' ');
                }
            }
            _ => {}
        }
    }
}

/// URLs of the anchors under `el`: absolute links in document order, then
/// internal links resolved against `base`. Fragment-only, special-page and
/// identifier-registry links are dropped; duplicates keep first position.
pub(crate) fn citation_urls(el: ElementRef<'_>, base: Option<&url::Url>) -> (Vec<String>, Option<String>) {
    let sel = scraper::Selector::parse("a[href]").expect("static selector");
    let mut absolute = Vec::new();
    let mut internal = Vec::new();
    let mut anchor_title = None;
    for a in el.select(&sel) {
        let href = a.value().attr("href").unwrap_or("").trim();
        if href.is_empty() || href.starts_with('#') {
            continue;
        }
        if anchor_title.is_none() {
            let t = a.value().attr("title").map(normalize_ws).filter(|t| !t.is_empty());
            anchor_title = t.or_else(|| Some(normalize_ws(&a.text().collect::<String>())).filter(|t| !t.is_empty()));
        }
        if href.starts_with("http://") || href.starts_with("https://") {
            absolute.push(href.to_string());
        } else if let Some(rest) = href.strip_prefix("//") {
            absolute.push(format!("https://{rest}"));
        } else {
            if href.contains("Special:") || href.contains("_(identifier)") || href.starts_with("javascript:") {
                continue;
            }
            if let Some(u) = base.and_then(|b| b.join(href).ok()) {
                let mut u = u;
                u.set_fragment(None);
                internal.push(u.to_string());
            }
        }
    }
    let mut seen = HashSet::new();
    let urls = absolute.into_iter().chain(internal).filter(|u| seen.insert(u.clone())).collect();
    (urls, anchor_title)
}
