//! Prompt construction from the shipped coding manual and parsing of
//! model replies.

use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::TaxonomyError;
use crate::model::EpistemicCategory;
use crate::parsing::CitationRecord;

const MANUAL: &str = include_str!("../../assets/coding_manual.md");

/// Bumped whenever the manual text or the code table changes.
pub const MANUAL_VERSION: &str = "coding-manual/1.0 (codes: 1 academic, 2 government, 3 news, 4 ngo, 5 corporate, 6 opinion, 7 reference, 8 ugc)";

/// The coding manual sent with every model request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifierPromptAsset {
    pub manual_text: String,
    pub version: String,
}

impl Default for ClassifierPromptAsset {
    fn default() -> Self {
        Self::shipped()
    }
}

impl ClassifierPromptAsset {
    pub fn shipped() -> Self {
        Self { manual_text: MANUAL.to_string(), version: MANUAL_VERSION.to_string() }
    }
}

/// One decision-tree question, by step number.
pub fn step_question(step: u8) -> &'static str {
    match step {
        1 => "Is the cited work original research or scholarship that passed scholarly review (journal article, scholarly book, dissertation)?",
        2 => "Is the cited work an official publication of a government or intergovernmental body (legislature, agency, court)?",
        3 => "Is the cited work a report or publication by a non-profit, mission-driven organization such as an NGO or think tank?",
        4 => "Is the cited work a specific factual report on events, produced by a journalist or news publisher?",
        5 => "Is the cited work commentary written to persuade (op-ed, editorial, advocacy piece)?",
        6 => "Is the cited work published by a for-profit company about its own business (press release, annual report, corporate blog)?",
        7 => "Is the cited work a tertiary source such as an encyclopedia or dictionary entry?",
        8 => "Is the cited work informal content from a private individual acting outside any institution (social post, forum post, personal blog)?",
        _ => "",
    }
}

fn citation_block(c: &CitationRecord) -> String {
    let mut s = String::from("Citation:\n");
    s.push_str(&format!("- Reference text: {}\n", c.raw_text));
    if let Some(u) = c.first_url() {
        s.push_str(&format!("- URL: {u}\n"));
    }
    if let Some(d) = &c.domain {
        s.push_str(&format!("- Domain: {d}\n"));
    }
    s
}

/// Full-manual labelling prompt: manual, code legend, citation, and the
/// required answer format.
pub fn build_classifier_prompt(asset: &ClassifierPromptAsset, c: &CitationRecord) -> String {
    let mut s = String::with_capacity(asset.manual_text.len() + 1024);
    s.push_str(asset.manual_text.trim_end());
    s.push_str("\n\n---\n\n## Task\n\nLegend:\n");
    for cat in EpistemicCategory::by_code() {
        s.push_str(&format!("{} = {}\n", cat.code(), cat.name()));
    }
    s.push('\n');
    s.push_str(&citation_block(c));
    s.push_str(
        "\nClassify this citation using the manual above. Reply with exactly two lines:\n\
         Category: <one code from 1 to 8>\n\
         Justification: <one sentence>\n",
    );
    s
}

/// Single-step yes/no prompt used when the rule engine cannot answer a
/// decision step from local evidence.
pub fn build_step_prompt(asset: &ClassifierPromptAsset, c: &CitationRecord, step: u8) -> String {
    let mut s = String::with_capacity(asset.manual_text.len() + 1024);
    s.push_str(asset.manual_text.trim_end());
    s.push_str("\n\n---\n\n## Task\n\n");
    s.push_str(&format!("Decision step: {step}\nQuestion: {}\n\n", step_question(step)));
    s.push_str(&citation_block(c));
    s.push_str("\nAnswer the question for this citation only. Reply with YES or NO on the first line.\n");
    s
}

struct Alias {
    cat: EpistemicCategory,
    re: Regex,
}

static ALIASES: LazyLock<Vec<Alias>> = LazyLock::new(|| {
    use EpistemicCategory::*;
    let table: [(EpistemicCategory, &str); 8] = [
        (Academic, r"academic|scholarly"),
        (Government, r"government"),
        (NgoThinktank, r"ngo(?:_thinktank)?|ngos|civil\s+society|think[\s-]?tanks?"),
        (News, r"news|journalism"),
        (Opinion, r"opinion|advocacy|op-ed"),
        (Corporate, r"corporate|commercial"),
        (ReferenceTertiary, r"reference(?:_tertiary)?|tertiary"),
        (Ugc, r"ugc|user[\s-]generated(?:\s+content)?"),
    ];
    table
        .into_iter()
        .map(|(cat, pat)| Alias { cat, re: Regex::new(&format!(r"(?i)\b(?:{pat})\b")).expect("alias regex") })
        .collect()
});

static CATEGORY_LINE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?im)^[\s*#>_-]*(?:category|label|code)\b[\s*_]*[:=]\s*(.+)$").expect("regex"));
static CONFIDENCE: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(?i)confidence\b[\s*_]*[:=]?\s*([01](?:\.\d+)?|\.\d+)").expect("regex"));
static DIGIT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"\b([1-8])\b").expect("regex"));

fn distinct_names(text: &str) -> Vec<EpistemicCategory> {
    ALIASES.iter().filter(|a| a.re.is_match(text)).map(|a| a.cat).collect()
}

/// Extracts one category (and an optional confidence) from a reply.
///
/// A `Category:` line is preferred over the rest of the text. Within the
/// chosen region, category names win over bare codes; more than one
/// distinct category, or none at all, is malformed.
pub fn parse_llm_label(response: &str) -> Result<(EpistemicCategory, Option<f64>), TaxonomyError> {
    let malformed = |why: &str| TaxonomyError::MalformedResponse(format!("{why}: {:?}", truncate(response, 200)));
    let confidence = CONFIDENCE
        .captures(response)
        .and_then(|c| c[1].parse::<f64>().ok())
        .filter(|v| (0.0..=1.0).contains(v));
    let without_conf = CONFIDENCE.replace_all(response, " ");
    let region = CATEGORY_LINE
        .captures(&without_conf)
        .map(|c| c[1].to_string())
        .unwrap_or_else(|| without_conf.to_string());

    let names = distinct_names(&region);
    match names.len() {
        1 => return Ok((names[0], confidence)),
        n if n > 1 => return Err(malformed("more than one category named")),
        _ => {}
    }
    let mut codes: Vec<u8> = DIGIT.captures_iter(&region).filter_map(|c| c[1].parse().ok()).collect();
    codes.sort_unstable();
    codes.dedup();
    match codes.as_slice() {
        [code] => Ok((EpistemicCategory::from_code(*code).expect("1-8"), confidence)),
        [] => Err(malformed("no category found")),
        _ => Err(malformed("more than one category code")),
    }
}

static YES: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\byes\b").expect("regex"));
static NO: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)\bno\b").expect("regex"));

/// Reads a YES/NO answer, looking at the first non-empty line first.
pub fn parse_yes_no(response: &str) -> Result<bool, TaxonomyError> {
    let first = response.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    for region in [first, response] {
        match (YES.is_match(region), NO.is_match(region)) {
            (true, false) => return Ok(true),
            (false, true) => return Ok(false),
            _ => {}
        }
    }
    Err(TaxonomyError::MalformedResponse(format!("expected YES or NO: {:?}", truncate(response, 200))))
}

fn truncate(s: &str, n: usize) -> &str {
    match s.char_indices().nth(n) {
        Some((i, _)) => &s[..i],
        None => s,
    }
}
