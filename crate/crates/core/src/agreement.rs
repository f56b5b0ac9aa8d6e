//! Inter-rater agreement: Cohen's kappa, Krippendorff's alpha and
//! per-category precision / recall / F1.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{EpistemicCategory, CATEGORY_COUNT};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgreementError {
    #[error("label sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("no labels to compare")]
    Empty,
    #[error("label matrix needs at least two raters")]
    TooFewRaters,
    #[error("label matrix row {0} has {1} cells, expected {2}")]
    RaggedRow(usize, usize, usize),
    #[error("item `{0}` has no label from any rater")]
    UnlabeledItem(String),
    #[error("no item carries two or more labels")]
    NoPairableValues,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaResult {
    pub kappa: f64,
    pub observed: f64,
    pub expected: f64,
    /// Set when chance agreement is 1 and kappa is fixed at 1 by convention.
    pub degenerate: bool,
}

/// Cohen's kappa for two complete label sequences.
pub fn cohen_kappa<T: Ord + Clone>(a: &[T], b: &[T]) -> Result<KappaResult, AgreementError> {
    if a.len() != b.len() {
        return Err(AgreementError::LengthMismatch(a.len(), b.len()));
    }
    if a.is_empty() {
        return Err(AgreementError::Empty);
    }
    let n = a.len() as f64;
    let mut ma: BTreeMap<&T, f64> = BTreeMap::new();
    let mut mb: BTreeMap<&T, f64> = BTreeMap::new();
    let mut agree = 0.0;
    for (x, y) in a.iter().zip(b) {
        *ma.entry(x).or_default() += 1.0;
        *mb.entry(y).or_default() += 1.0;
        if x == y {
            agree += 1.0;
        }
    }
    let observed = agree / n;
    let expected: f64 = ma
        .iter()
        .map(|(k, ca)| ca * mb.get(k).copied().unwrap_or(0.0))
        .sum::<f64>()
        / (n * n);
    if (1.0 - expected).abs() < 1e-15 {
        return Ok(KappaResult { kappa: 1.0, observed, expected, degenerate: true });
    }
    Ok(KappaResult {
        kappa: (observed - expected) / (1.0 - expected),
        observed,
        expected,
        degenerate: false,
    })
}

/// Difference function used by Krippendorff's alpha.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DifferenceMetric {
    #[default]
    Nominal,
    /// Squared difference of the numeric codes.
    Interval,
}

impl DifferenceMetric {
    fn delta(self, a: u32, b: u32) -> f64 {
        match self {
            DifferenceMetric::Nominal => f64::from(u8::from(a != b)),
            DifferenceMetric::Interval => (f64::from(a) - f64::from(b)).powi(2),
        }
    }
}

impl std::str::FromStr for DifferenceMetric {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nominal" => Ok(Self::Nominal),
            "interval" => Ok(Self::Interval),
            other => Err(format!("unknown difference metric `{other}`")),
        }
    }
}

/// Items x raters grid of numeric label codes, `None` for missing cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelMatrix {
    pub items: Vec<String>,
    pub raters: Vec<String>,
    pub labels: Vec<Vec<Option<u32>>>,
}

impl LabelMatrix {
    pub fn new(
        items: Vec<String>,
        raters: Vec<String>,
        labels: Vec<Vec<Option<u32>>>,
    ) -> Result<Self, AgreementError> {
        if raters.len() < 2 {
            return Err(AgreementError::TooFewRaters);
        }
        for (i, row) in labels.iter().enumerate() {
            if row.len() != raters.len() {
                return Err(AgreementError::RaggedRow(i, row.len(), raters.len()));
            }
            if row.iter().all(Option::is_none) {
                let id = items.get(i).cloned().unwrap_or_else(|| i.to_string());
                return Err(AgreementError::UnlabeledItem(id));
            }
        }
        Ok(Self { items, raters, labels })
    }

    /// Builds a matrix from per-rater category sequences (wire codes).
    pub fn from_categories(raters: &[(&str, &[Option<EpistemicCategory>])]) -> Result<Self, AgreementError> {
        let n = raters.first().map(|r| r.1.len()).unwrap_or(0);
        if let Some(bad) = raters.iter().find(|r| r.1.len() != n) {
            return Err(AgreementError::LengthMismatch(n, bad.1.len()));
        }
        let labels = (0..n)
            .map(|i| raters.iter().map(|r| r.1[i].map(|c| u32::from(c.code()))).collect())
            .collect();
        Self::new(
            (0..n).map(|i| i.to_string()).collect(),
            raters.iter().map(|r| r.0.to_string()).collect(),
            labels,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlphaResult {
    pub alpha: f64,
    pub observed_disagreement: f64,
    pub expected_disagreement: f64,
    pub pairable_values: f64,
    /// Set when expected disagreement is zero and alpha is fixed at 1.
    pub no_variation: bool,
}

/// Krippendorff's alpha using the coincidence-matrix formulation.
///
/// Only items with at least two labels are pairable; singly-coded items
/// contribute nothing to either disagreement term.
pub fn krippendorff_alpha(m: &LabelMatrix, metric: DifferenceMetric) -> Result<AlphaResult, AgreementError> {
    let mut coincidence: BTreeMap<(u32, u32), f64> = BTreeMap::new();
    for row in &m.labels {
        let vals: Vec<u32> = row.iter().flatten().copied().collect();
        let mu = vals.len();
        if mu < 2 {
            continue;
        }
        let w = 1.0 / (mu as f64 - 1.0);
        for (i, &a) in vals.iter().enumerate() {
            for (j, &b) in vals.iter().enumerate() {
                if i != j {
                    *coincidence.entry((a, b)).or_default() += w;
                }
            }
        }
    }
    let n: f64 = coincidence.values().sum();
    if n <= 1.0 {
        return Err(AgreementError::NoPairableValues);
    }
    let mut marginal: BTreeMap<u32, f64> = BTreeMap::new();
    for (&(a, _), &w) in &coincidence {
        *marginal.entry(a).or_default() += w;
    }
    let d_o = coincidence.iter().map(|(&(a, b), &w)| w * metric.delta(a, b)).sum::<f64>() / n;
    let mut d_e = 0.0;
    for (&a, &na) in &marginal {
        for (&b, &nb) in &marginal {
            d_e += na * nb * metric.delta(a, b);
        }
    }
    d_e /= n * (n - 1.0);
    if d_e <= 0.0 {
        return Ok(AlphaResult {
            alpha: 1.0,
            observed_disagreement: d_o,
            expected_disagreement: d_e,
            pairable_values: n,
            no_variation: true,
        });
    }
    Ok(AlphaResult {
        alpha: 1.0 - d_o / d_e,
        observed_disagreement: d_o,
        expected_disagreement: d_e,
        pairable_values: n,
        no_variation: false,
    })
}

/// One-vs-rest scores for a category; `None` where the ratio is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CategoryScores {
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f1: Option<f64>,
    pub support: u64,
    pub predicted: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationScores {
    pub accuracy: f64,
    pub per_category: BTreeMap<EpistemicCategory, CategoryScores>,
    /// Rows are reference labels, columns predictions, canonical category order.
    pub confusion: [[u64; CATEGORY_COUNT]; CATEGORY_COUNT],
    /// Categories absent from both label sets.
    pub empty_classes: Vec<EpistemicCategory>,
}

pub fn category_prf(
    reference: &[EpistemicCategory],
    predicted: &[EpistemicCategory],
) -> Result<ClassificationScores, AgreementError> {
    if reference.len() != predicted.len() {
        return Err(AgreementError::LengthMismatch(reference.len(), predicted.len()));
    }
    if reference.is_empty() {
        return Err(AgreementError::Empty);
    }
    let mut confusion = [[0u64; CATEGORY_COUNT]; CATEGORY_COUNT];
    for (r, p) in reference.iter().zip(predicted) {
        confusion[r.index()][p.index()] += 1;
    }
    let total = reference.len() as f64;
    let trace: u64 = (0..CATEGORY_COUNT).map(|i| confusion[i][i]).sum();

    let mut per_category = BTreeMap::new();
    let mut empty_classes = Vec::new();
    for c in EpistemicCategory::ALL {
        let i = c.index();
        let tp = confusion[i][i];
        let support: u64 = confusion[i].iter().sum();
        let predicted: u64 = (0..CATEGORY_COUNT).map(|r| confusion[r][i]).sum();
        if support == 0 && predicted == 0 {
            empty_classes.push(c);
        }
        let ratio = |num: u64, den: u64| (den > 0).then(|| num as f64 / den as f64);
        per_category.insert(
            c,
            CategoryScores {
                precision: ratio(tp, predicted),
                recall: ratio(tp, support),
                f1: ratio(2 * tp, support + predicted),
                support,
                predicted,
            },
        );
    }
    Ok(ClassificationScores {
        accuracy: trace as f64 / total,
        per_category,
        confusion,
        empty_classes,
    })
}

/// Full two-rater comparison (reference vs. prediction).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n: usize,
    pub kappa: KappaResult,
    pub alpha: AlphaResult,
    pub scores: ClassificationScores,
}

pub fn agreement_report(
    reference: &[EpistemicCategory],
    predicted: &[EpistemicCategory],
) -> Result<AgreementReport, AgreementError> {
    let kappa = cohen_kappa(reference, predicted)?;
    let r: Vec<Option<EpistemicCategory>> = reference.iter().copied().map(Some).collect();
    let p: Vec<Option<EpistemicCategory>> = predicted.iter().copied().map(Some).collect();
    let matrix = LabelMatrix::from_categories(&[("reference", &r), ("predicted", &p)])?;
    let alpha = krippendorff_alpha(&matrix, DifferenceMetric::Nominal)?;
    let scores = category_prf(reference, predicted)?;
    Ok(AgreementReport { n: reference.len(), kappa, alpha, scores })
}

/// Distinct labels observed in a matrix.
pub fn observed_values(m: &LabelMatrix) -> BTreeSet<u32> {
    m.labels.iter().flatten().flatten().copied().collect()
}
