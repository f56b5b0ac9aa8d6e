//! MediaWiki article pages.

use std::collections::HashSet;

use scraper::{ElementRef, Html, Selector};

use super::{citation_urls, count_words, visible_text, CitationRecord, ParseError, ParsedArticle};
use crate::acquisition::RawDocument;
use crate::model::Platform;

fn sel(s: &str) -> Selector {
    Selector::parse(s).expect("static selector")
}

fn inside_any(el: ElementRef<'_>, ids: &HashSet<ego_tree::NodeId>) -> bool {
    el.ancestors().any(|a| ids.contains(&a.id()))
}

/// Citations are `ol.references` list items plus stray `cite.citation`
/// templates outside those lists. Words are counted in
/// `div#mw-content-text` with every reference list, stray citation,
/// footnote marker and edit link removed.
pub fn parse_wikipedia_article(doc: &RawDocument) -> Result<ParsedArticle, ParseError> {
    if doc.platform != Platform::Wikipedia {
        return Err(ParseError::WrongPlatform { expected: Platform::Wikipedia, found: doc.platform });
    }
    let html = Html::parse_document(&doc.body_str());
    let root = html
        .select(&sel("div#mw-content-text"))
        .next()
        .ok_or_else(|| ParseError::ContentRootMissing { title: doc.title.clone(), selector: "div#mw-content-text" })?;
    let base = url::Url::parse(&doc.url).ok();

    let lists: Vec<ElementRef<'_>> = root.select(&sel("ol.references")).collect();
    let list_ids: HashSet<_> = lists.iter().map(|l| l.id()).collect();
    // nested reference lists (grouped notes) are handled by their outer list
    let outer: Vec<ElementRef<'_>> = lists.iter().copied().filter(|l| !inside_any(*l, &list_ids)).collect();

    let mut citations = Vec::new();
    let mut items: Vec<ElementRef<'_>> = Vec::new();
    for list in &outer {
        for li in list.child_elements().filter(|c| c.value().name() == "li") {
            items.push(li);
        }
    }
    let text_sel = sel(".reference-text");
    for li in &items {
        let body = li.select(&text_sel).next().unwrap_or(*li);
        let raw: String = body.text().collect();
        let (urls, anchor) = citation_urls(body, base.as_ref());
        citations.push(CitationRecord::new(citations.len(), &raw, urls, anchor));
    }
    let mut stray = Vec::new();
    for cite in root.select(&sel("cite.citation")) {
        if inside_any(cite, &list_ids) {
            continue;
        }
        stray.push(cite.id());
        let raw: String = cite.text().collect();
        let (urls, anchor) = citation_urls(cite, base.as_ref());
        citations.push(CitationRecord::new(citations.len(), &raw, urls, anchor));
    }

    // footnote markers and edit links are not body text
    let mut skip: HashSet<_> = outer.iter().map(|l| l.id()).collect();
    skip.extend(root.select(&sel("sup.reference, .mw-editsection")).map(|e| e.id()));
    skip.extend(stray);
    let word_count = count_words(&visible_text(root, &skip));
    Ok(ParsedArticle { platform: Platform::Wikipedia, title: doc.title.clone(), word_count, citations })
}
