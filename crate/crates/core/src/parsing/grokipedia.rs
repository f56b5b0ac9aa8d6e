//! Grokipedia article pages. There is no fixed reference markup, so
//! reference sections are found from their headings.

use std::collections::HashSet;
use std::sync::LazyLock;

use ego_tree::NodeId;
use regex::Regex;
use scraper::{ElementRef, Html, Selector};

use super::{citation_urls, count_words, visible_text, CitationRecord, ParseError, ParsedArticle};
use crate::acquisition::RawDocument;
use crate::model::Platform;

static REF_HEADING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)\b(references?|sources?|bibliograph(y|ies))\b").expect("static regex"));

fn heading_level(el: &ElementRef<'_>) -> Option<u8> {
    match el.value().name() {
        "h1" => Some(1),
        "h2" => Some(2),
        "h3" => Some(3),
        "h4" => Some(4),
        "h5" => Some(5),
        "h6" => Some(6),
        _ => None,
    }
}

/// Element siblings after the heading, up to the next heading of the same
/// or a higher level. A heading wrapped alone in a container uses the
/// container's siblings instead.
fn section_nodes<'a>(heading: ElementRef<'a>, root: ElementRef<'a>) -> (NodeId, Vec<ElementRef<'a>>) {
    let level = heading_level(&heading).unwrap_or(6);
    let mut anchor = heading;
    loop {
        let has_next = anchor.next_siblings().any(|s| ElementRef::wrap(s).is_some());
        if has_next || anchor.id() == root.id() {
            break;
        }
        match anchor.parent().and_then(ElementRef::wrap) {
            Some(p) if p.id() != root.id() => anchor = p,
            _ => break,
        }
    }
    let headings = Selector::parse("h1,h2,h3,h4,h5,h6").expect("static selector");
    let closes = |h: &ElementRef<'_>| heading_level(h).is_some_and(|l| l <= level);
    let mut nodes = Vec::new();
    for sib in anchor.next_siblings().filter_map(ElementRef::wrap) {
        // a wrapped heading of the same rank also ends the section
        if closes(&sib) || sib.select(&headings).any(|h| closes(&h)) {
            break;
        }
        nodes.push(sib);
    }
    (anchor.id(), nodes)
}

fn top_level_items<'a>(node: ElementRef<'a>) -> Vec<ElementRef<'a>> {
    if node.value().name() == "li" {
        return vec![node];
    }
    let li = Selector::parse("li").expect("static selector");
    node.select(&li)
        .filter(|item| {
            item.ancestors()
                .take_while(|a| a.id() != node.id())
                .all(|a| ElementRef::wrap(a).is_none_or(|e| e.value().name() != "li"))
        })
        .collect()
}

/// Citations are the top-level list items of every section whose heading
/// mentions references, sources or a bibliography. Words are counted in
/// `main` with those headings and sections removed.
pub fn parse_grokipedia_article(doc: &RawDocument) -> Result<ParsedArticle, ParseError> {
    if doc.platform != Platform::Grokipedia {
        return Err(ParseError::WrongPlatform { expected: Platform::Grokipedia, found: doc.platform });
    }
    let html = Html::parse_document(&doc.body_str());
    let root = html
        .select(&Selector::parse("main").expect("static selector"))
        .next()
        .ok_or_else(|| ParseError::ContentRootMissing { title: doc.title.clone(), selector: "main" })?;
    let base = url::Url::parse(&doc.url).ok();
    let headings = Selector::parse("h1,h2,h3,h4,h5,h6").expect("static selector");

    let mut skip: HashSet<NodeId> = HashSet::new();
    let mut seen_items: HashSet<NodeId> = HashSet::new();
    let mut citations = Vec::new();
    for h in root.select(&headings) {
        if skip.contains(&h.id()) || h.ancestors().any(|a| skip.contains(&a.id())) {
            continue;
        }
        let text: String = h.text().collect();
        if !REF_HEADING.is_match(&text) {
            continue;
        }
        let (anchor, nodes) = section_nodes(h, root);
        skip.insert(anchor);
        skip.insert(h.id());
        for node in nodes {
            skip.insert(node.id());
            for item in top_level_items(node) {
                if !seen_items.insert(item.id()) {
                    continue;
                }
                let raw: String = item.text().collect();
                let (urls, anchor_title) = citation_urls(item, base.as_ref());
                citations.push(CitationRecord::new(citations.len(), &raw, urls, anchor_title));
            }
        }
    }
    let word_count = count_words(&visible_text(root, &skip));
    Ok(ParsedArticle { platform: Platform::Grokipedia, title: doc.title.clone(), word_count, citations })
}
