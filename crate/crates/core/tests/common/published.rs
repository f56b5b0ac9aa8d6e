//! Published reference numbers, transcribed once and shared by test targets.

use epiaudit::EpistemicCategory::{self, *};
use epiaudit::TopicCategory::{self, *};

/// Corpus-level counts and printed percentages: (category, wiki n, wiki %, grok n, grok %).
pub const GLOBAL_TABLE: [(EpistemicCategory, u64, f64, u64, f64); 8] = [
    (Academic, 11305, 31.82, 2021, 8.75),
    (Corporate, 2471, 6.96, 2313, 10.02),
    (Government, 3517, 9.90, 3455, 14.96),
    (NgoThinktank, 1554, 4.37, 3493, 15.13),
    (News, 11697, 32.93, 6569, 28.45),
    (Opinion, 1947, 5.48, 1597, 6.92),
    (ReferenceTertiary, 2720, 7.66, 2367, 10.25),
    (Ugc, 314, 0.88, 1277, 5.53),
];

pub struct EffectRow {
    pub topic: TopicCategory,
    pub n: usize,
    pub mean: f64,
    pub ci: (f64, f64),
    pub d: f64,
}

/// Paired entropy effects (Grokipedia minus Wikipedia) per topic.
pub const ENTROPY_EFFECTS: [EffectRow; 6] = [
    EffectRow { topic: Geographic, n: 16, mean: 0.36, ci: (0.21, 0.52), d: 1.27 },
    EffectRow { topic: PoliticsConflict, n: 15, mean: 0.90, ci: (0.50, 1.31), d: 1.24 },
    EffectRow { topic: GenKnowledgeSociety, n: 11, mean: 0.61, ci: (0.24, 0.99), d: 1.09 },
    EffectRow { topic: Music, n: 9, mean: 0.30, ci: (0.02, 0.57), d: 0.82 },
    EffectRow { topic: MediaEntertainment, n: 4, mean: 0.16, ci: (-0.48, 0.79), d: 0.39 },
    EffectRow { topic: Sports, n: 17, mean: 0.14, ci: (-0.05, 0.33), d: 0.37 },
];

/// Article-size summaries: (platform label, words mean, sd, citations mean, sd, density mean, sd).
pub const SIZE_TABLE: [(&str, f64, f64, f64, f64, f64, f64); 2] = [
    ("Wikipedia", 11439.0, 3447.8, 493.4, 207.9, 47.8, 38.3),
    ("Grokipedia", 14240.7, 5044.3, 320.7, 129.4, 22.4, 6.2),
];

/// Linear citation-volume fits: (platform label, adjusted R^2, slope).
pub const SCALING_FITS: [(&str, f64, f64); 2] = [("Wikipedia", 0.36, 0.037), ("Grokipedia", 0.66, 0.021)];

/// Topic assortativity at each similarity threshold: (threshold, wiki r, grok r).
pub const ASSORTATIVITY: [(f64, f64, f64); 3] = [(0.65, 0.076, 0.132), (0.75, 0.097, 0.178), (0.85, 0.162, 0.218)];
