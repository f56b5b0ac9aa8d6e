//! Parser fixtures with hand-counted citations and words.

use std::path::PathBuf;

use epiaudit::acquisition::RawDocument;
use epiaudit::parsing::{parse_article, ParseError};
use epiaudit::Platform;

fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/html")
}

fn load(file: &str, platform: Platform, title: &str) -> RawDocument {
    let body = std::fs::read(fixture_dir().join(file)).unwrap();
    let url = match platform {
        Platform::Wikipedia => format!("https://en.wikipedia.org/wiki/{title}"),
        Platform::Grokipedia => format!("https://grokipedia.com/page/{title}"),
    };
    RawDocument::new(platform, title, &url, body, "2025-11-02T00:00:00Z".parse().unwrap())
}

#[derive(serde::Deserialize)]
struct Expected {
    file: String,
    platform: String,
    title: String,
    citations: usize,
    words: u64,
}

#[test]
fn hand_counted_fixtures() {
    let mut rdr = csv::Reader::from_path(fixture_dir().join("expected.csv")).unwrap();
    let rows: Vec<Expected> = rdr.deserialize().map(Result::unwrap).collect();
    assert!(rows.len() >= 6);
    for e in rows {
        let p = parse_article(&load(&e.file, e.platform.parse().unwrap(), &e.title)).unwrap();
        assert_eq!(p.citations.len(), e.citations, "{} citations", e.file);
        assert_eq!(p.word_count, e.words, "{} words", e.file);
        for (i, c) in p.citations.iter().enumerate() {
            assert_eq!(c.index, i);
        }
    }
}

#[test]
fn wikipedia_reference_details() {
    let p = parse_article(&load("wiki_reflist.html", Platform::Wikipedia, "Alpha")).unwrap();
    let domains: Vec<Option<&str>> = p.citations.iter().map(|c| c.domain.as_deref()).collect();
    assert_eq!(
        domains,
        vec![Some("nytimes.com"), Some("nature.com"), Some("whitehouse.gov"), Some("wikipedia.org"), None]
    );
    // the identifier and special-page links are dropped
    assert_eq!(p.citations[3].urls, vec!["https://en.wikipedia.org/wiki/Alpha_Book".to_string()]);
    assert!(p.citations[0].raw_text.starts_with("Smith, J. (2020)."));
    assert_eq!(p.citations[4].raw_text, "Plain text note without link.");
    assert!((p.density_per_1k().unwrap() - 5.0 / 16.0 * 1000.0).abs() < 1e-9);
}

#[test]
fn stray_bibliography_cites_follow_lists() {
    let p = parse_article(&load("wiki_notes_and_bib.html", Platform::Wikipedia, "Beta")).unwrap();
    assert_eq!(p.citations[2].domain.as_deref(), Some("bbc.com"));
    assert_eq!(p.citations[5].anchor_title.as_deref(), Some("The Wealth of Nations"));
    assert!(p.citations[6].urls.is_empty());
    assert!(p.citations[6].raw_text.contains("Treatise of Human Nature"));
}

#[test]
fn grokipedia_domains_and_unlinked_items() {
    let p = parse_article(&load("grok_references.html", Platform::Grokipedia, "Alpha")).unwrap();
    let domains: Vec<Option<&str>> = p.citations.iter().map(|c| c.domain.as_deref()).collect();
    assert_eq!(
        domains,
        vec![Some("bbc.co.uk"), Some("nytimes.com"), Some("arxiv.org"), Some("tesla.com"), Some("x.com"), None]
    );
}

#[test]
fn no_reference_articles_are_flagged() {
    for (file, platform) in [("wiki_stub_no_refs.html", Platform::Wikipedia), ("grok_no_refs.html", Platform::Grokipedia)]
    {
        let p = parse_article(&load(file, platform, "Gamma")).unwrap();
        assert!(matches!(p.require_references(), Err(ParseError::NoReferences(t)) if t == "Gamma"));
    }
}

#[test]
fn wrong_root_is_an_error() {
    let doc = load("grok_references.html", Platform::Wikipedia, "Alpha");
    assert!(matches!(parse_article(&doc), Err(ParseError::ContentRootMissing { .. })));
}
