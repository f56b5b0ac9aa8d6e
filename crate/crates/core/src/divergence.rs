//! Distribution comparison metrics for epistemic profiles: Shannon
//! entropy, Jensen-Shannon divergence, cosine similarity, paired effect
//! sizes and the Kruskal-Wallis H-test.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::special;

const SIMPLEX_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("invalid probability vector: {0}")]
    InvalidSimplex(String),
    #[error("vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("zero vector has no direction")]
    ZeroVector,
    #[error("paired differences have zero variance")]
    ZeroVariance,
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("all observations are tied; H is undefined")]
    AllTied,
    #[error("need at least two non-empty groups")]
    TooFewGroups,
}

/// A probability vector (non-negative, sums to one).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplexVector(Vec<f64>);

impl SimplexVector {
    pub fn new(p: Vec<f64>) -> Result<Self, MetricError> {
        if p.is_empty() {
            return Err(MetricError::InvalidSimplex("empty vector".into()));
        }
        if let Some(bad) = p.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(MetricError::InvalidSimplex(format!("entry {bad} is negative or not finite")));
        }
        let total: f64 = p.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(MetricError::InvalidSimplex(format!("entries sum to {total}")));
        }
        Ok(Self(p))
    }

    /// Normalizes non-negative counts. Zero totals are rejected, never smoothed.
    pub fn from_counts(counts: &[f64]) -> Result<Self, MetricError> {
        let total: f64 = counts.iter().sum();
        if !(total > 0.0) {
            return Err(MetricError::InvalidSimplex("counts sum to zero".into()));
        }
        Self::new(counts.iter().map(|c| c / total).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn plog2p(p: f64) -> f64 {
    if p > 0.0 {
        p * p.log2()
    } else {
        0.0
    }
}

/// Shannon entropy in bits, with 0·log 0 = 0.
pub fn shannon_entropy(p: &SimplexVector) -> f64 {
    let h = -p.0.iter().map(|&v| plog2p(v)).sum::<f64>();
    h.max(0.0)
}

/// Jensen-Shannon divergence with base-2 logarithms (bounded in [0, 1]).
pub fn jensen_shannon_divergence(p: &SimplexVector, q: &SimplexVector) -> Result<f64, MetricError> {
    if p.len() != q.len() {
        return Err(MetricError::LengthMismatch(p.len(), q.len()));
    }
    let m: Vec<f64> = p.0.iter().zip(&q.0).map(|(a, b)| 0.5 * (a + b)).collect();
    let hm = -m.iter().map(|&v| plog2p(v)).sum::<f64>();
    let jsd = hm - 0.5 * (shannon_entropy(p) + shannon_entropy(q));
    Ok(jsd.clamp(0.0, 1.0))
}

/// Cosine of the angle between two vectors.
pub fn cosine_similarity(p: &[f64], q: &[f64]) -> Result<f64, MetricError> {
    if p.len() != q.len() {
        return Err(MetricError::LengthMismatch(p.len(), q.len()));
    }
    let dot: f64 = p.iter().zip(q).map(|(a, b)| a * b).sum();
    let np = p.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nq = q.iter().map(|a| a * a).sum::<f64>().sqrt();
    if np == 0.0 || nq == 0.0 {
        return Err(MetricError::ZeroVector);
    }
    Ok((dot / (np * nq)).clamp(-1.0, 1.0))
}

/// Paired standardized mean difference (d_z) with a t-based 95% CI for the mean.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectSize {
    pub mean_diff: f64,
    pub ci95: (f64, f64),
    pub d: f64,
    pub sd: f64,
    pub n: usize,
}

pub fn paired_cohens_d(diffs: &[f64]) -> Result<EffectSize, MetricError> {
    let n = diffs.len();
    if n < 2 {
        return Err(MetricError::TooFewObservations { needed: 2, got: n });
    }
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    let sd = var.sqrt();
    if sd <= 1e-12 * mean.abs().max(1.0) {
        return Err(MetricError::ZeroVariance);
    }
    let half = special::t_quantile(0.975, n as f64 - 1.0) * sd / (n as f64).sqrt();
    Ok(EffectSize {
        mean_diff: mean,
        ci95: (mean - half, mean + half),
        d: mean / sd,
        sd,
        n,
    })
}

/// Recovers d_z from a published mean difference, its 95% CI and the sample size.
///
/// The CI half-width is `t(0.975, n-1) * sd / sqrt(n)`, so the standard
/// deviation of the paired differences follows directly.
pub fn d_from_reported_ci(mean_diff: f64, ci: (f64, f64), n: usize) -> Result<f64, MetricError> {
    if n < 2 {
        return Err(MetricError::TooFewObservations { needed: 2, got: n });
    }
    let half = 0.5 * (ci.1 - ci.0);
    if half <= 0.0 {
        return Err(MetricError::ZeroVariance);
    }
    let t = special::t_quantile(0.975, n as f64 - 1.0);
    let sd = half * (n as f64).sqrt() / t;
    Ok(mean_diff / sd)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HTestResult {
    #[serde(rename = "H")]
    pub h: f64,
    pub df: usize,
    pub p_value: f64,
    pub tie_correction: f64,
}

/// Mid-ranks (1-based, ties averaged) of a sample.
pub fn mid_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Kruskal-Wallis H-test with tie correction; p from the chi-square tail.
pub fn kruskal_wallis(groups: &[Vec<f64>]) -> Result<HTestResult, MetricError> {
    let groups: Vec<&Vec<f64>> = groups.iter().filter(|g| !g.is_empty()).collect();
    if groups.len() < 2 {
        return Err(MetricError::TooFewGroups);
    }
    let pooled: Vec<f64> = groups.iter().flat_map(|g| g.iter().copied()).collect();
    let n = pooled.len();
    if n < 3 {
        return Err(MetricError::TooFewObservations { needed: 3, got: n });
    }
    let ranks = mid_ranks(&pooled);

    let mut offset = 0;
    let mut sum_term = 0.0;
    for g in &groups {
        let r: f64 = ranks[offset..offset + g.len()].iter().sum();
        sum_term += r * r / g.len() as f64;
        offset += g.len();
    }
    let nf = n as f64;
    let h_raw = 12.0 / (nf * (nf + 1.0)) * sum_term - 3.0 * (nf + 1.0);

    let mut sorted = pooled.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_sum = 0.0;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j + 1 < sorted.len() && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_sum += t * t * t - t;
        i = j + 1;
    }
    let tie_correction = 1.0 - tie_sum / (nf * nf * nf - nf);
    if tie_correction <= 0.0 {
        return Err(MetricError::AllTied);
    }
    let h = (h_raw / tie_correction).max(0.0);
    let df = groups.len() - 1;
    Ok(HTestResult {
        h,
        df,
        p_value: special::chi2_sf(h, df as f64).clamp(0.0, 1.0),
        tie_correction,
    })
}
