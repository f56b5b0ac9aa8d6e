//! Seeded synthetic snapshot of the 72-topic corpus.
//!
//! Page sizes follow the published per-platform means and spreads, citation
//! counts follow a linear law in word count with the published slopes, and
//! each citation's category is drawn from a per-article Dirichlet centred
//! on the published corpus shares (tilted per topic). Every citation points
//! at a host the rule engine resolves on its own, so the snapshot runs
//! fully offline in rules mode.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use epiaudit::acquisition::{load_topics, Cache, FetchPolicy, RawDocument, TopicEntry};
use epiaudit::{EpistemicCategory, Platform, TopicCategory};
use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Dirichlet, Normal};

pub const SEED: u64 = 20251102;

/// Published corpus-wide counts, canonical category order.
pub const WIKI_COUNTS: [u64; 8] = [11305, 3517, 1554, 11697, 1947, 2471, 2720, 314];
pub const GROK_COUNTS: [u64; 8] = [2021, 3455, 3493, 6569, 1597, 2313, 2367, 1277];

struct Law {
    words_mean: f64,
    words_sd: f64,
    slope: f64,
    intercept: f64,
    noise_sd: f64,
}

// Intercepts put the mean citation count on the published mean; noise
// is set so the expected R^2 matches the published fit.
const WIKI_LAW: Law = Law { words_mean: 11439.0, words_sd: 3447.8, slope: 0.037, intercept: 70.2, noise_sd: 170.0 };
const GROK_LAW: Law = Law { words_mean: 14240.7, words_sd: 5044.3, slope: 0.021, intercept: 21.6, noise_sd: 76.0 };

fn topic_tilt(t: TopicCategory) -> [f64; 8] {
    use TopicCategory::*;
    match t {
        Sports => [0.4, 0.5, 0.8, 1.6, 1.0, 1.0, 1.3, 1.2],
        Geographic => [1.2, 1.6, 1.0, 0.9, 0.8, 0.8, 1.1, 0.8],
        PoliticsConflict => [1.0, 1.3, 1.5, 1.0, 1.4, 0.6, 0.8, 0.8],
        GenKnowledgeSociety => [1.8, 1.0, 1.2, 0.7, 1.0, 0.8, 1.0, 0.8],
        Music => [0.4, 0.5, 0.6, 1.3, 1.0, 1.1, 1.5, 1.5],
        MediaEntertainment => [0.4, 0.6, 0.6, 1.1, 0.9, 1.6, 1.5, 1.3],
    }
}

const HOSTS: [&[&str]; 8] = [
    &["https://www.jstor.org/stable/", "https://www.nature.com/articles/", "https://arxiv.org/abs/", "https://doi.org/10.1000/"],
    &["https://www.whitehouse.gov/briefing/", "https://www.gov.uk/government/", "https://www.un.org/en/", "https://www.census.gov/data/"],
    &["https://www.brookings.edu/articles/", "https://www.hrw.org/report/", "https://www.amnesty.org/en/", "https://www.rand.org/pubs/"],
    &["https://www.bbc.com/news/", "https://www.nytimes.com/2024/", "https://www.reuters.com/world/", "https://apnews.com/article/"],
    &["https://www.theguardian.com/commentisfree/", "https://www.nationalreview.com/", "https://www.huffpost.com/entry/", "https://reason.com/"],
    &["https://www.apple.com/newsroom/", "https://www.prnewswire.com/news-releases/", "https://www.nike.com/a/", "https://www.sony.com/en/"],
    &["https://www.britannica.com/topic/", "https://www.imdb.com/title/", "https://www.allmusic.com/artist/", "https://www.merriam-webster.com/dictionary/"],
    &["https://www.reddit.com/r/", "https://someone.blogspot.com/", "https://www.fandom.com/wiki/", "https://www.quora.com/"],
];

const WORDS: &[&str] = &[
    "the", "of", "and", "in", "was", "history", "season", "league", "album", "government", "city", "war", "state",
    "became", "during", "first", "after", "national", "team", "record", "world", "people", "century", "public",
];

pub struct Snapshot {
    pub seed: u64,
    pub topics: Vec<TopicEntry>,
    pub pages: BTreeMap<(Platform, String), String>,
}

fn shares(counts: &[u64; 8]) -> [f64; 8] {
    let total: u64 = counts.iter().sum();
    counts.map(|c| c as f64 / total as f64)
}

fn body_text(rng: &mut ChaCha8Rng, words: usize, marker: bool) -> String {
    let mut s = String::new();
    let mut left = words;
    let mut n = 0;
    while left > 0 {
        let len = left.min(80);
        s.push_str("<p>");
        for i in 0..len {
            if i > 0 {
                s.push(' ');
            }
            s.push_str(WORDS[rng.gen_range(0..WORDS.len())]);
        }
        if marker {
            n += 1;
            let _ = write!(s, "<sup class=\"reference\"><a href=\"#cite_note-{n}\">[{n}]</a></sup>");
        }
        s.push_str("</p>\n");
        left -= len;
    }
    s
}

fn citation_items(rng: &mut ChaCha8Rng, cats: &[EpistemicCategory]) -> String {
    let mut s = String::new();
    for (i, c) in cats.iter().enumerate() {
        let hosts = HOSTS[c.index()];
        let host = hosts[rng.gen_range(0..hosts.len())];
        let id: u32 = rng.gen_range(1000..999_999);
        let _ = writeln!(s, "<li><a class=\"external\" href=\"{host}{id}\">Source {i} title {id}</a>. Retrieved 2025.</li>");
    }
    s
}

fn page(rng: &mut ChaCha8Rng, platform: Platform, title: &str, topic: TopicCategory) -> String {
    let (law, base) = match platform {
        Platform::Wikipedia => (&WIKI_LAW, shares(&WIKI_COUNTS)),
        Platform::Grokipedia => (&GROK_LAW, shares(&GROK_COUNTS)),
    };
    let words = Normal::new(law.words_mean, law.words_sd).unwrap().sample(rng).max(1500.0);
    let noise = Normal::new(0.0, law.noise_sd).unwrap().sample(rng);
    let n_cites = (law.intercept + law.slope * words + noise).round().max(20.0) as usize;
    let tilt = topic_tilt(topic);
    let alpha: Vec<f64> = (0..8).map(|i| (30.0 * base[i] * tilt[i]).max(0.05)).collect();
    let p = Dirichlet::new(&alpha).unwrap().sample(rng);
    let pick = WeightedIndex::new(&p).unwrap();
    let cats: Vec<EpistemicCategory> =
        (0..n_cites).map(|_| EpistemicCategory::from_index(pick.sample(rng)).unwrap()).collect();
    // heading words are part of the body, so leave room for them
    let body = body_text(rng, words as usize - 3, platform == Platform::Wikipedia);
    let items = citation_items(rng, &cats);
    match platform {
        Platform::Wikipedia => format!(
            "<!DOCTYPE html><html><head><title>{title} - Wikipedia</title></head><body>\n\
             <div id=\"mw-content-text\"><div class=\"mw-parser-output\">\n{body}\
             <h2><span class=\"mw-headline\">History</span><span class=\"mw-editsection\">[edit]</span></h2>\n\
             <h2><span class=\"mw-headline\">References</span></h2>\n<div class=\"reflist\"><ol class=\"references\">\n{items}</ol></div>\n\
             </div></div></body></html>\n"
        ),
        Platform::Grokipedia => format!(
            "<!DOCTYPE html><html><head><title>{title} | Grokipedia</title></head><body>\n\
             <header>Grokipedia</header><main><article>\n<h1>{title}</h1>\n{body}<h2>References</h2>\n<ol>\n{items}</ol>\n\
             </article></main></body></html>\n"
        ),
    }
}

pub fn topics() -> Vec<TopicEntry> {
    load_topics(&super::workspace_root().join("data/topics_72.csv")).expect("bundled topic list")
}

pub fn build(seed: u64) -> Snapshot {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topics = topics();
    let mut pages = BTreeMap::new();
    for t in &topics {
        for p in Platform::ALL {
            pages.insert((p, t.title.clone()), page(&mut rng, p, &t.title, t.topic_category));
        }
    }
    Snapshot { seed, topics, pages }
}

impl Snapshot {
    pub fn html(&self, platform: Platform, title: &str) -> Option<&str> {
        self.pages.get(&(platform, title.to_string())).map(String::as_str)
    }

    /// Writes every page into `cache` with a fixed retrieval time.
    pub fn store(&self, cache: &Cache) {
        let policy = FetchPolicy::default();
        let at = "2025-11-02T00:00:00Z".parse().unwrap();
        for ((p, title), html) in &self.pages {
            let doc = RawDocument::new(*p, title, &policy.article_url(*p, title), html.as_bytes().to_vec(), at);
            cache.store(&doc).unwrap();
        }
    }

    pub fn write_topics(&self, path: &Path) {
        std::fs::copy(super::workspace_root().join("data/topics_72.csv"), path).unwrap();
    }
}
