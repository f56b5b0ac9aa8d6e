//! Per-article epistemic profiles and corpus-level aggregates.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EpistemicCategory, Platform, CATEGORY_COUNT};
use crate::special;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProfileError {
    #[error("article `{0}` has no classified citations")]
    EmptyArticle(String),
    #[error("no classified citations for {0}")]
    EmptyCorpus(Platform),
}

/// Category counts and proportions for one article on one platform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpistemicProfile {
    pub article: String,
    pub platform: Platform,
    pub counts: [u64; CATEGORY_COUNT],
    pub proportions: [f64; CATEGORY_COUNT],
}

impl EpistemicProfile {
    pub fn from_labels(
        article: &str,
        platform: Platform,
        labels: &[EpistemicCategory],
    ) -> Result<Self, ProfileError> {
        let mut counts = [0u64; CATEGORY_COUNT];
        for l in labels {
            counts[l.index()] += 1;
        }
        Self::from_counts(article, platform, counts)
    }

    pub fn from_counts(
        article: &str,
        platform: Platform,
        counts: [u64; CATEGORY_COUNT],
    ) -> Result<Self, ProfileError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(ProfileError::EmptyArticle(article.to_string()));
        }
        let mut proportions = [0.0; CATEGORY_COUNT];
        for (p, c) in proportions.iter_mut().zip(counts) {
            *p = c as f64 / total as f64;
        }
        Ok(Self { article: article.to_string(), platform, counts, proportions })
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn has(&self, c: EpistemicCategory) -> bool {
        self.counts[c.index()] > 0
    }
}

/// Corpus-wide sums for one platform (proportions of sums, not means of proportions).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalProfile {
    pub platform: Platform,
    pub counts: [u64; CATEGORY_COUNT],
    pub percent: [f64; CATEGORY_COUNT],
    pub total: u64,
}

impl GlobalProfile {
    pub fn from_counts(platform: Platform, counts: [u64; CATEGORY_COUNT]) -> Result<Self, ProfileError> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(ProfileError::EmptyCorpus(platform));
        }
        let mut percent = [0.0; CATEGORY_COUNT];
        for (p, c) in percent.iter_mut().zip(counts) {
            *p = 100.0 * c as f64 / total as f64;
        }
        Ok(Self { platform, counts, percent, total })
    }

    pub fn percent_of(&self, c: EpistemicCategory) -> f64 {
        self.percent[c.index()]
    }
}

pub fn global_profile<'a>(
    platform: Platform,
    profiles: impl IntoIterator<Item = &'a EpistemicProfile>,
) -> Result<GlobalProfile, ProfileError> {
    let mut counts = [0u64; CATEGORY_COUNT];
    for p in profiles.into_iter().filter(|p| p.platform == platform) {
        for (acc, c) in counts.iter_mut().zip(p.counts) {
            *acc += c;
        }
    }
    GlobalProfile::from_counts(platform, counts)
}

/// Sample mean and (n-1) standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSd {
    pub n: usize,
    pub mean: f64,
    pub sd: Option<f64>,
}

impl MeanSd {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let sd = (n >= 2).then(|| {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt()
        });
        Some(Self { n, mean, sd })
    }
}

/// Mean with a t-based 95% confidence interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanCi {
    pub n: usize,
    pub mean: f64,
    pub sd: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

impl MeanCi {
    pub fn of(values: &[f64]) -> Option<Self> {
        let ms = MeanSd::of(values)?;
        let sd = ms.sd?;
        let half = special::t_quantile(0.975, ms.n as f64 - 1.0) * sd / (ms.n as f64).sqrt();
        Some(Self { n: ms.n, mean: ms.mean, sd, ci_low: ms.mean - half, ci_high: ms.mean + half })
    }
}

/// Length and citation volume of one parsed article.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleSize {
    pub title: String,
    pub platform: Platform,
    pub word_count: u64,
    pub citation_count: u64,
}

impl ArticleSize {
    /// Citations per 1,000 words; undefined for empty bodies.
    pub fn density_per_1k(&self) -> Option<f64> {
        (self.word_count > 0).then(|| self.citation_count as f64 / self.word_count as f64 * 1000.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformStats {
    pub articles: usize,
    pub word_count: Option<MeanSd>,
    pub citation_count: Option<MeanSd>,
    pub density_per_1k: Option<MeanSd>,
    /// Articles left out of the density average because their body has no words.
    pub density_excluded: usize,
    /// Mean per-article proportion of each category (canonical order).
    pub category_means: Vec<(EpistemicCategory, Option<MeanCi>)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub platforms: BTreeMap<Platform, PlatformStats>,
}

pub fn descriptive_stats(sizes: &[ArticleSize], profiles: &[EpistemicProfile]) -> DescriptiveStats {
    let mut platforms = BTreeMap::new();
    for platform in Platform::ALL {
        let rows: Vec<&ArticleSize> = sizes.iter().filter(|s| s.platform == platform).collect();
        let words: Vec<f64> = rows.iter().map(|s| s.word_count as f64).collect();
        let cites: Vec<f64> = rows.iter().map(|s| s.citation_count as f64).collect();
        let dens: Vec<f64> = rows.iter().filter_map(|s| s.density_per_1k()).collect();
        let profs: Vec<&EpistemicProfile> = profiles.iter().filter(|p| p.platform == platform).collect();
        let category_means = EpistemicCategory::ALL
            .into_iter()
            .map(|c| {
                let vals: Vec<f64> = profs.iter().map(|p| p.proportions[c.index()]).collect();
                (c, MeanCi::of(&vals))
            })
            .collect();
        platforms.insert(
            platform,
            PlatformStats {
                articles: rows.len(),
                word_count: MeanSd::of(&words),
                citation_count: MeanSd::of(&cites),
                density_per_1k: MeanSd::of(&dens),
                density_excluded: rows.len() - dens.len(),
                category_means,
            },
        );
    }
    DescriptiveStats { platforms }
}
