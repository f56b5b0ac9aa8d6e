//! Shared domain vocabulary: platforms, topic categories and the eight
//! epistemic source categories.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Number of epistemic categories in the taxonomy.
pub const CATEGORY_COUNT: usize = 8;

/// Encyclopedia platform a document was harvested from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Platform {
    Wikipedia,
    Grokipedia,
}

impl Platform {
    pub const ALL: [Platform; 2] = [Platform::Wikipedia, Platform::Grokipedia];

    /// Lowercase identifier used for cache directories and file names.
    pub fn slug(self) -> &'static str {
        match self {
            Platform::Wikipedia => "wikipedia",
            Platform::Grokipedia => "grokipedia",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Platform::Wikipedia => "Wikipedia",
            Platform::Grokipedia => "Grokipedia",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for Platform {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "wikipedia" => Ok(Platform::Wikipedia),
            "grokipedia" => Ok(Platform::Grokipedia),
            other => Err(format!("unknown platform `{other}`")),
        }
    }
}

/// Closed set of six article topic clusters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum TopicCategory {
    Sports,
    Geographic,
    PoliticsConflict,
    GenKnowledgeSociety,
    Music,
    MediaEntertainment,
}

impl TopicCategory {
    pub const ALL: [TopicCategory; 6] = [
        TopicCategory::Sports,
        TopicCategory::Geographic,
        TopicCategory::PoliticsConflict,
        TopicCategory::GenKnowledgeSociety,
        TopicCategory::Music,
        TopicCategory::MediaEntertainment,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn code(self) -> &'static str {
        match self {
            TopicCategory::Sports => "SPORTS",
            TopicCategory::Geographic => "GEOGRAPHIC",
            TopicCategory::PoliticsConflict => "POLITICS_CONFLICT",
            TopicCategory::GenKnowledgeSociety => "GEN_KNOWLEDGE_SOCIETY",
            TopicCategory::Music => "MUSIC",
            TopicCategory::MediaEntertainment => "MEDIA_ENTERTAINMENT",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            TopicCategory::Sports => "Sports & Athletics",
            TopicCategory::Geographic => "Geographic Entities",
            TopicCategory::PoliticsConflict => "Politics & Conflict",
            TopicCategory::GenKnowledgeSociety => "Gen. Knowledge & Society",
            TopicCategory::Music => "Music & Musicians",
            TopicCategory::MediaEntertainment => "Media & Entertainment",
        }
    }
}

impl fmt::Display for TopicCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for TopicCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = s.trim().to_ascii_uppercase().replace([' ', '-'], "_");
        TopicCategory::ALL
            .into_iter()
            .find(|t| t.code() == key)
            .ok_or_else(|| format!("unknown topic category `{s}`"))
    }
}

/// The eight mutually exclusive epistemic source categories.
///
/// Declaration order follows the classification decision tree and is the
/// canonical coordinate order of every profile vector. The wire code
/// returned by [`EpistemicCategory::code`] follows the published category
/// table instead (1 = Academic ... 8 = UGC).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EpistemicCategory {
    Academic,
    Government,
    NgoThinktank,
    News,
    Opinion,
    Corporate,
    ReferenceTertiary,
    Ugc,
}

impl EpistemicCategory {
    /// All categories in canonical (decision-tree) order.
    pub const ALL: [EpistemicCategory; CATEGORY_COUNT] = [
        EpistemicCategory::Academic,
        EpistemicCategory::Government,
        EpistemicCategory::NgoThinktank,
        EpistemicCategory::News,
        EpistemicCategory::Opinion,
        EpistemicCategory::Corporate,
        EpistemicCategory::ReferenceTertiary,
        EpistemicCategory::Ugc,
    ];

    /// Position in profile vectors.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// Decision-tree step that yields this category (1-8).
    pub fn step(self) -> u8 {
        self.index() as u8 + 1
    }

    /// Stable wire code, 1-8, in published table order.
    pub fn code(self) -> u8 {
        match self {
            EpistemicCategory::Academic => 1,
            EpistemicCategory::Government => 2,
            EpistemicCategory::News => 3,
            EpistemicCategory::NgoThinktank => 4,
            EpistemicCategory::Corporate => 5,
            EpistemicCategory::Opinion => 6,
            EpistemicCategory::ReferenceTertiary => 7,
            EpistemicCategory::Ugc => 8,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            EpistemicCategory::Academic => "Academic & Scholarly",
            EpistemicCategory::Government => "Government & Official",
            EpistemicCategory::NgoThinktank => "NGO, Civil Society & Think Tank",
            EpistemicCategory::News => "News & Journalism",
            EpistemicCategory::Opinion => "Opinion & Advocacy",
            EpistemicCategory::Corporate => "Corporate & Commercial",
            EpistemicCategory::ReferenceTertiary => "Reference & Tertiary Source",
            EpistemicCategory::Ugc => "User-Generated Content (UGC)",
        }
    }

    pub fn ident(self) -> &'static str {
        match self {
            EpistemicCategory::Academic => "ACADEMIC",
            EpistemicCategory::Government => "GOVERNMENT",
            EpistemicCategory::NgoThinktank => "NGO_THINKTANK",
            EpistemicCategory::News => "NEWS",
            EpistemicCategory::Opinion => "OPINION",
            EpistemicCategory::Corporate => "CORPORATE",
            EpistemicCategory::ReferenceTertiary => "REFERENCE_TERTIARY",
            EpistemicCategory::Ugc => "UGC",
        }
    }

    /// Categories ordered by wire code.
    pub fn by_code() -> [EpistemicCategory; CATEGORY_COUNT] {
        let mut all = Self::ALL;
        all.sort_by_key(|c| c.code());
        all
    }
}

impl fmt::Display for EpistemicCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.ident())
    }
}

impl FromStr for EpistemicCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Ok(code) = t.parse::<u8>() {
            return Self::from_code(code).ok_or_else(|| format!("category code {code} out of range"));
        }
        let key = t.to_ascii_uppercase().replace([' ', '-', '/'], "_");
        Self::ALL
            .into_iter()
            .find(|c| c.ident() == key || c.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| format!("unknown category `{s}`"))
    }
}

/// Turns an article title into a filesystem-safe slug.
///
/// Alphanumerics are kept (lowercased), every other run of characters
/// collapses to a single `_`. A short digest suffix keeps distinct titles
/// that slugify identically apart.
pub fn slugify(title: &str) -> String {
    use sha2::{Digest, Sha256};

    let mut out = String::with_capacity(title.len());
    let mut pending_sep = false;
    for ch in title.chars() {
        if ch.is_alphanumeric() {
            if pending_sep && !out.is_empty() {
                out.push('_');
            }
            pending_sep = false;
            out.extend(ch.to_lowercase());
        } else {
            pending_sep = true;
        }
    }
    if out.is_empty() {
        out.push_str("untitled");
    }
    let digest = Sha256::digest(title.as_bytes());
    format!("{out}-{}", &hex::encode(digest)[..8])
}
