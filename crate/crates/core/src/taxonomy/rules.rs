//! Local evidence for decision steps: work-level markers found in the
//! citation text or URL path, and domain-level markers from the host.

use std::collections::BTreeSet;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::model::EpistemicCategory;
use crate::parsing::CitationRecord;

/// Where a step answer came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Basis {
    WorkLevel,
    DomainLevel,
    Llm,
}

/// Categories suggested by the cited item itself and by its host.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Evidence {
    pub work: BTreeSet<EpistemicCategory>,
    pub domain: BTreeSet<EpistemicCategory>,
}

impl Evidence {
    /// Work-level evidence decides every step when present (the cited
    /// item outranks its host); otherwise domain evidence decides;
    /// otherwise the step is open.
    pub fn answer(&self, step: u8) -> Option<(bool, Basis)> {
        let cat = EpistemicCategory::from_index(step as usize - 1)?;
        if !self.work.is_empty() {
            Some((self.work.contains(&cat), Basis::WorkLevel))
        } else if !self.domain.is_empty() {
            Some((self.domain.contains(&cat), Basis::DomainLevel))
        } else {
            None
        }
    }

    pub fn is_empty(&self) -> bool {
        self.work.is_empty() && self.domain.is_empty()
    }
}

struct Marker {
    cat: EpistemicCategory,
    re: Regex,
}

fn markers(table: &[(EpistemicCategory, &str)]) -> Vec<Marker> {
    table
        .iter()
        .map(|(cat, pat)| Marker { cat: *cat, re: Regex::new(&format!("(?i){pat}")).expect("marker regex") })
        .collect()
}

// Genre markers only: words naming what kind of item this is. Subject
// words are deliberately absent because topic must not drive the label.
static WORK_TEXT: LazyLock<Vec<Marker>> = LazyLock::new(|| {
    use EpistemicCategory::*;
    markers(&[
        (Academic, r"\bdoi\s*:\s*10\.|\bdoi\.org/10\.|\barxiv\s*:|\bjournal of\b|\bproceedings of\b|\buniversity press(?:$|[^-\w])|\bdoctoral (?:dissertation|thesis)\b|\bph\.?\s?d\.? (?:dissertation|thesis)\b|\bpeer[- ]reviewed\b"),
        (Opinion, r"\bop-?ed\b|\bopinion\s*[|:]|\beditorial\b|\bguest column\b|\bcommentary\s*[|:]"),
        (Corporate, r"\bpress[- ]release\b|\bannual report\b|\bform 10-?k\b|\binvestor relations\b|\bcompany blog\b"),
        (Ugc, r"\bpersonal blog\b|\bforum post\b|\breddit comment\b|\bfan site\b"),
    ])
});

static PRESS_RELEASE: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"(?i)press\s+release").expect("regex"));

static WORK_PATH: LazyLock<Vec<Marker>> = LazyLock::new(|| {
    use EpistemicCategory::*;
    markers(&[
        (Academic, r"^/(?:doi|abs|article|articles|paper)/10\.\d{4,}"),
        (Opinion, r"/(?:opinion|opinions|op-ed|oped|editorials?|commentisfree|columnists?)(?:/|$)"),
        (Corporate, r"/(?:press-releases?|pressreleases?|investor-relations|investors)(?:/|$)"),
        (Ugc, r"^/~|/(?:forum|forums|community/threads?)(?:/|$)"),
    ])
});

/// Host suffixes (matched on label boundaries) with their category.
const DOMAINS: &[(&str, EpistemicCategory)] = {
    use EpistemicCategory::*;
    &[
        // scholarly publishers, indexes and repositories
        ("doi.org", Academic), ("jstor.org", Academic), ("nature.com", Academic), ("science.org", Academic),
        ("sciencedirect.com", Academic), ("springer.com", Academic), ("wiley.com", Academic),
        ("tandfonline.com", Academic), ("cambridge.org", Academic), ("academic.oup.com", Academic),
        ("ncbi.nlm.nih.gov", Academic), ("arxiv.org", Academic), ("ssrn.com", Academic), ("biorxiv.org", Academic),
        ("plos.org", Academic), ("pnas.org", Academic), ("mdpi.com", Academic), ("frontiersin.org", Academic),
        ("acm.org", Academic), ("ieee.org", Academic), ("bmj.com", Academic), ("thelancet.com", Academic),
        ("nejm.org", Academic), ("cell.com", Academic), ("sagepub.com", Academic), ("jamanetwork.com", Academic),
        ("muse.jhu.edu", Academic), ("semanticscholar.org", Academic), ("aps.org", Academic), ("iop.org", Academic),
        ("journals.uchicago.edu", Academic), ("annualreviews.org", Academic),
        // government and intergovernmental
        ("gov", Government), ("mil", Government), ("gov.uk", Government), ("gc.ca", Government),
        ("gov.au", Government), ("gov.in", Government), ("gouv.fr", Government), ("bund.de", Government),
        ("europa.eu", Government), ("int", Government), ("un.org", Government), ("worldbank.org", Government),
        ("imf.org", Government), ("oecd.org", Government), ("parliament.uk", Government),
        ("kremlin.ru", Government), ("go.jp", Government), ("gov.cn", Government), ("gov.il", Government),
        // non-profits and think tanks
        ("brookings.edu", NgoThinktank), ("amnesty.org", NgoThinktank), ("greenpeace.org", NgoThinktank),
        ("hrw.org", NgoThinktank), ("rand.org", NgoThinktank), ("cfr.org", NgoThinktank),
        ("heritage.org", NgoThinktank), ("cato.org", NgoThinktank), ("pewresearch.org", NgoThinktank),
        ("icrc.org", NgoThinktank), ("oxfam.org", NgoThinktank), ("transparency.org", NgoThinktank),
        ("aclu.org", NgoThinktank), ("carnegieendowment.org", NgoThinktank), ("chathamhouse.org", NgoThinktank),
        ("csis.org", NgoThinktank), ("sipri.org", NgoThinktank), ("crisisgroup.org", NgoThinktank),
        ("freedomhouse.org", NgoThinktank), ("rsf.org", NgoThinktank), ("cpj.org", NgoThinktank),
        ("splcenter.org", NgoThinktank), ("adl.org", NgoThinktank), ("wwf.org", NgoThinktank),
        ("aei.org", NgoThinktank), ("urban.org", NgoThinktank), ("wilsoncenter.org", NgoThinktank),
        // news publishers and broadcasters
        ("nytimes.com", News), ("wsj.com", News), ("washingtonpost.com", News), ("theguardian.com", News),
        ("bbc.co.uk", News), ("bbc.com", News), ("reuters.com", News), ("apnews.com", News), ("npr.org", News),
        ("cnn.com", News), ("nbcnews.com", News), ("cbsnews.com", News), ("abcnews.go.com", News),
        ("foxnews.com", News), ("usatoday.com", News), ("latimes.com", News), ("bloomberg.com", News),
        ("ft.com", News), ("economist.com", News), ("politico.com", News), ("axios.com", News), ("time.com", News),
        ("newsweek.com", News), ("aljazeera.com", News), ("dw.com", News), ("france24.com", News),
        ("lemonde.fr", News), ("spiegel.de", News), ("independent.co.uk", News), ("telegraph.co.uk", News),
        ("thetimes.co.uk", News), ("cnbc.com", News), ("espn.com", News), ("skysports.com", News),
        ("billboard.com", News), ("variety.com", News), ("hollywoodreporter.com", News), ("rollingstone.com", News),
        ("people.com", News), ("indiatimes.com", News), ("hindustantimes.com", News), ("thehindu.com", News),
        ("scmp.com", News), ("japantimes.co.jp", News), ("abc.net.au", News), ("cbc.ca", News),
        ("theglobeandmail.com", News), ("nypost.com", News), ("chicagotribune.com", News),
        ("bostonglobe.com", News), ("haaretz.com", News), ("timesofisrael.com", News), ("jpost.com", News),
        ("straitstimes.com", News), ("pbs.org", News), ("theatlantic.com", News), ("nme.com", News),
        ("pitchfork.com", News), ("deadline.com", News), ("ew.com", News), ("theathletic.com", News),
        ("goal.com", News), ("tass.com", News), ("xinhuanet.com", News), ("kyodonews.net", News),
        // outlets whose output is predominantly argument
        ("huffpost.com", Opinion), ("dailywire.com", Opinion), ("breitbart.com", Opinion),
        ("nationalreview.com", Opinion), ("motherjones.com", Opinion), ("jacobin.com", Opinion),
        ("townhall.com", Opinion), ("thefederalist.com", Opinion), ("salon.com", Opinion),
        ("commondreams.org", Opinion), ("reason.com", Opinion), ("dailykos.com", Opinion),
        // companies and press-release wires
        ("tesla.com", Corporate), ("apple.com", Corporate), ("microsoft.com", Corporate), ("ibm.com", Corporate),
        ("samsung.com", Corporate), ("sony.com", Corporate), ("nvidia.com", Corporate), ("intel.com", Corporate),
        ("about.fb.com", Corporate), ("blog.google", Corporate), ("amazon.com", Corporate),
        ("prnewswire.com", Corporate), ("businesswire.com", Corporate), ("globenewswire.com", Corporate),
        ("spacex.com", Corporate), ("x.ai", Corporate), ("openai.com", Corporate), ("nike.com", Corporate),
        // encyclopedias, dictionaries and reference databases
        ("wikipedia.org", ReferenceTertiary), ("wikimedia.org", ReferenceTertiary),
        ("wiktionary.org", ReferenceTertiary), ("wikidata.org", ReferenceTertiary),
        ("grokipedia.com", ReferenceTertiary), ("britannica.com", ReferenceTertiary),
        ("dictionary.com", ReferenceTertiary), ("merriam-webster.com", ReferenceTertiary),
        ("oed.com", ReferenceTertiary), ("encyclopedia.com", ReferenceTertiary),
        ("imdb.com", ReferenceTertiary), ("allmusic.com", ReferenceTertiary),
        ("boxofficemojo.com", ReferenceTertiary), ("baseball-reference.com", ReferenceTertiary),
        ("basketball-reference.com", ReferenceTertiary), ("pro-football-reference.com", ReferenceTertiary),
        ("worldatlas.com", ReferenceTertiary), ("newworldencyclopedia.org", ReferenceTertiary),
        // open user platforms
        ("reddit.com", Ugc), ("quora.com", Ugc), ("blogspot.com", Ugc), ("wordpress.com", Ugc),
        ("tumblr.com", Ugc), ("fandom.com", Ugc), ("discogs.com", Ugc), ("genius.com", Ugc),
        ("stackexchange.com", Ugc), ("goodreads.com", Ugc),
    ]
};

fn host_matches(host: &str, suffix: &str) -> bool {
    host == suffix || host.ends_with(&format!(".{suffix}"))
}

/// Collects local evidence for a citation.
pub fn evidence(c: &CitationRecord) -> Evidence {
    let mut ev = Evidence::default();
    let url = c.first_url().and_then(|u| url::Url::parse(u).ok());
    let mut text = c.raw_text.clone();
    if let Some(t) = &c.anchor_title {
        text.push(' ');
        text.push_str(t);
    }
    // "University Press release" is an announcement, not a press imprint
    let text = PRESS_RELEASE.replace_all(&text, "press-release");
    for m in WORK_TEXT.iter() {
        if m.re.is_match(&text) {
            ev.work.insert(m.cat);
        }
    }
    if let Some(u) = &url {
        let path = u.path().to_ascii_lowercase();
        for m in WORK_PATH.iter() {
            if m.re.is_match(&path) {
                ev.work.insert(m.cat);
            }
        }
    }
    let host = url
        .as_ref()
        .and_then(|u| u.host_str().map(|h| h.trim_end_matches('.').to_ascii_lowercase()))
        .or_else(|| c.domain.clone());
    if let Some(h) = host {
        for (suffix, cat) in DOMAINS {
            if host_matches(&h, suffix) {
                ev.domain.insert(*cat);
            }
        }
    }
    ev
}
