//! Citation-volume vs. article-length scaling fits: polynomial OLS,
//! log-linear exponential fits, backward elimination of the quadratic
//! term, and the most/least-cited extremes report.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Platform, TopicCategory};
use crate::special;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScalingError {
    #[error("x and y differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    InsufficientData { needed: usize, got: usize },
    #[error("design matrix is singular")]
    SingularDesign,
    #[error("exponential fit needs strictly positive y (index {0})")]
    NonpositiveY(usize),
    #[error("degree must be 1 or 2, got {0}")]
    UnsupportedDegree(usize),
    #[error("significance level {0} outside [0, 1]")]
    InvalidAlpha(f64),
    #[error("{platform} has {got} articles, extremes report with k = {k} needs {needed}")]
    InsufficientCorpus { platform: Platform, k: usize, needed: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ModelKind {
    Linear,
    Quadratic,
    Exponential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub term: String,
    pub estimate: f64,
    pub std_error: f64,
    /// `None` when the standard error is zero (exact fit).
    pub t_stat: Option<f64>,
    pub p_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub model_kind: ModelKind,
    pub coefficients: Vec<Coefficient>,
    pub r2: f64,
    pub r2_adj: f64,
    pub n: usize,
    pub df_resid: usize,
    pub residual_se: f64,
}

impl RegressionFit {
    pub fn coefficient(&self, term: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.term == term)
    }

    /// Prediction on the original scale.
    pub fn predict(&self, x: f64) -> f64 {
        let est = |t: &str| self.coefficient(t).map(|c| c.estimate).unwrap_or(0.0);
        match self.model_kind {
            ModelKind::Linear => est("intercept") + est("x") * x,
            ModelKind::Quadratic => est("intercept") + est("x") * x + est("x^2") * x * x,
            ModelKind::Exponential => est("alpha") * (est("beta") * x).exp(),
        }
    }

    /// Two-sided 95% confidence interval for a coefficient.
    pub fn ci95(&self, term: &str) -> Option<(f64, f64)> {
        let c = self.coefficient(term)?;
        let half = special::t_quantile(0.975, self.df_resid as f64) * c.std_error;
        Some((c.estimate - half, c.estimate + half))
    }
}

/// Solves a symmetric positive-definite system via Cholesky and also
/// returns the inverse. `None` if the matrix is numerically singular.
fn cholesky_inverse(a: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let k = a.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = a[i][j];
            for p in 0..j {
                s -= l[i][p] * l[j][p];
            }
            if i == j {
                if s <= 1e-10 * a[i][i].abs().max(1e-300) {
                    return None;
                }
                l[i][i] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    // invert L, then A^-1 = L^-T L^-1
    let mut linv = vec![vec![0.0; k]; k];
    for i in 0..k {
        linv[i][i] = 1.0 / l[i][i];
        for j in 0..i {
            let mut s = 0.0;
            for p in j..i {
                s -= l[i][p] * linv[p][j];
            }
            linv[i][j] = s / l[i][i];
        }
    }
    let mut inv = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            inv[i][j] = (i.max(j)..k).map(|p| linv[p][i] * linv[p][j]).sum();
        }
    }
    Some(inv)
}

fn coefficient(term: &str, estimate: f64, std_error: f64, df: usize) -> Coefficient {
    let (t_stat, p_value) = if std_error > 0.0 {
        let t = estimate / std_error;
        (Some(t), special::t_two_sided_p(t, df as f64))
    } else if estimate == 0.0 {
        (None, 1.0)
    } else {
        (None, 0.0)
    };
    Coefficient { term: term.to_string(), estimate, std_error, t_stat, p_value }
}

fn r_squared(y: &[f64], fitted: impl Iterator<Item = f64>, params: usize) -> (f64, f64) {
    let n = y.len() as f64;
    let mean = y.iter().sum::<f64>() / n;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ssr: f64 = y.iter().zip(fitted).map(|(v, f)| (v - f).powi(2)).sum();
    let r2 = if sst > 0.0 { 1.0 - ssr / sst } else if ssr <= 0.0 { 1.0 } else { 0.0 };
    let adj = 1.0 - (1.0 - r2) * (n - 1.0) / (n - params as f64);
    (r2, adj)
}

/// Polynomial least squares (degree 1 or 2) with an intercept.
///
/// The design is built on the standardized predictor and the estimates
/// and their covariance are mapped back to the raw scale.
pub fn fit_ols(x: &[f64], y: &[f64], degree: usize) -> Result<RegressionFit, ScalingError> {
    if !(1..=2).contains(&degree) {
        return Err(ScalingError::UnsupportedDegree(degree));
    }
    if x.len() != y.len() {
        return Err(ScalingError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    let k = degree + 1;
    if n < degree + 2 {
        return Err(ScalingError::InsufficientData { needed: degree + 2, got: n });
    }
    let mean = x.iter().sum::<f64>() / n as f64;
    let sd = (x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    if !(sd > 0.0) {
        return Err(ScalingError::SingularDesign);
    }
    let rows: Vec<Vec<f64>> = x
        .iter()
        .map(|v| {
            let z = (v - mean) / sd;
            (0..k).map(|p| z.powi(p as i32)).collect()
        })
        .collect();
    let mut xtx = vec![vec![0.0; k]; k];
    let mut xty = vec![0.0; k];
    for (row, yi) in rows.iter().zip(y) {
        for i in 0..k {
            xty[i] += row[i] * yi;
            for j in 0..k {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    let inv = cholesky_inverse(&xtx).ok_or(ScalingError::SingularDesign)?;
    let b: Vec<f64> = (0..k).map(|i| (0..k).map(|j| inv[i][j] * xty[j]).sum()).collect();

    let fitted_z = |row: &Vec<f64>| row.iter().zip(&b).map(|(a, c)| a * c).sum::<f64>();
    let ssr: f64 = rows.iter().zip(y).map(|(r, yi)| (yi - fitted_z(r)).powi(2)).sum();
    let df = n - k;
    let sigma2 = ssr / df as f64;

    // raw = T * standardized
    let (m, s) = (mean, sd);
    let t: Vec<Vec<f64>> = if degree == 1 {
        vec![vec![1.0, -m / s], vec![0.0, 1.0 / s]]
    } else {
        vec![
            vec![1.0, -m / s, m * m / (s * s)],
            vec![0.0, 1.0 / s, -2.0 * m / (s * s)],
            vec![0.0, 0.0, 1.0 / (s * s)],
        ]
    };
    let raw: Vec<f64> = (0..k).map(|i| (0..k).map(|j| t[i][j] * b[j]).sum()).collect();
    let mut cov = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut acc = 0.0;
            for p in 0..k {
                for q in 0..k {
                    acc += t[i][p] * inv[p][q] * t[j][q];
                }
            }
            cov[i][j] = sigma2 * acc;
        }
    }
    let terms = ["intercept", "x", "x^2"];
    let coefficients =
        (0..k).map(|i| coefficient(terms[i], raw[i], cov[i][i].max(0.0).sqrt(), df)).collect();
    let (r2, r2_adj) = r_squared(y, rows.iter().map(fitted_z), k);
    Ok(RegressionFit {
        model_kind: if degree == 1 { ModelKind::Linear } else { ModelKind::Quadratic },
        coefficients,
        r2,
        r2_adj,
        n,
        df_resid: df,
        residual_se: sigma2.sqrt(),
    })
}

/// Fits `y = alpha * exp(beta * x)` by least squares on `ln y`.
///
/// R² and adjusted R² are computed on the original y scale against the
/// back-transformed predictions so they compare with the polynomial fits.
pub fn fit_exponential(x: &[f64], y: &[f64]) -> Result<RegressionFit, ScalingError> {
    if x.len() != y.len() {
        return Err(ScalingError::LengthMismatch(x.len(), y.len()));
    }
    if let Some(i) = y.iter().position(|v| !(*v > 0.0)) {
        return Err(ScalingError::NonpositiveY(i));
    }
    let log_y: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let lin = fit_ols(x, &log_y, 1)?;
    let a = lin.coefficient("intercept").expect("intercept");
    let b = lin.coefficient("x").expect("slope");
    let alpha = a.estimate.exp();
    let df = lin.df_resid;
    let alpha_coef = Coefficient {
        term: "alpha".into(),
        estimate: alpha,
        std_error: alpha * a.std_error,
        // test on the log-scale intercept
        t_stat: a.t_stat,
        p_value: a.p_value,
    };
    let beta_coef = coefficient("beta", b.estimate, b.std_error, df);
    let (r2, r2_adj) = r_squared(y, x.iter().map(|v| alpha * (b.estimate * v).exp()), 2);
    Ok(RegressionFit {
        model_kind: ModelKind::Exponential,
        coefficients: vec![alpha_coef, beta_coef],
        r2,
        r2_adj,
        n: x.len(),
        df_resid: df,
        residual_se: lin.residual_se,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EliminationStep {
    pub term: String,
    pub p_value: f64,
    pub dropped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSelection {
    pub alpha: f64,
    pub candidates: Vec<RegressionFit>,
    pub selected: ModelKind,
    pub elimination_trace: Vec<EliminationStep>,
    /// Why the exponential candidate is missing, if it is.
    pub exponential_skipped: Option<String>,
}

impl ModelSelection {
    pub fn fit(&self, kind: ModelKind) -> Option<&RegressionFit> {
        self.candidates.iter().find(|f| f.model_kind == kind)
    }

    pub fn selected_fit(&self) -> &RegressionFit {
        self.fit(self.selected).expect("selected model is a candidate")
    }
}

/// Backward elimination over the quadratic term only; intercept and the
/// linear term are always kept.
pub fn select_scaling_model(x: &[f64], y: &[f64], alpha: f64) -> Result<ModelSelection, ScalingError> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(ScalingError::InvalidAlpha(alpha));
    }
    let quadratic = fit_ols(x, y, 2)?;
    let linear = fit_ols(x, y, 1)?;
    let p = quadratic.coefficient("x^2").expect("quadratic term").p_value;
    let dropped = p > alpha;
    let mut candidates = vec![linear, quadratic];
    let exponential_skipped = match fit_exponential(x, y) {
        Ok(f) => {
            candidates.push(f);
            None
        }
        Err(e) => Some(e.to_string()),
    };
    Ok(ModelSelection {
        alpha,
        candidates,
        selected: if dropped { ModelKind::Linear } else { ModelKind::Quadratic },
        elimination_trace: vec![EliminationStep { term: "x^2".into(), p_value: p, dropped }],
        exponential_skipped,
    })
}

/// Mean citation density within fixed-width word-count bins.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityBin {
    pub lower: f64,
    pub upper: f64,
    pub n: usize,
    pub mean_density_per_1k: f64,
}

pub fn binned_density(words: &[f64], citations: &[f64], bin_width: f64) -> Vec<DensityBin> {
    let mut bins: BTreeMap<i64, (usize, f64)> = BTreeMap::new();
    for (w, c) in words.iter().zip(citations) {
        if *w <= 0.0 {
            continue;
        }
        let e = bins.entry((w / bin_width).floor() as i64).or_default();
        e.0 += 1;
        e.1 += c / w * 1000.0;
    }
    bins.into_iter()
        .map(|(b, (n, sum))| DensityBin {
            lower: b as f64 * bin_width,
            upper: (b + 1) as f64 * bin_width,
            n,
            mean_density_per_1k: sum / n as f64,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremeRow {
    pub title: String,
    pub topic: TopicCategory,
    pub citations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformExtremes {
    pub top: Vec<ExtremeRow>,
    pub bottom: Vec<ExtremeRow>,
    pub top_topics: BTreeMap<TopicCategory, usize>,
    pub bottom_topics: BTreeMap<TopicCategory, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremesReport {
    pub k: usize,
    pub platforms: BTreeMap<Platform, PlatformExtremes>,
}

/// Input row for the extremes report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CitationVolume {
    pub title: String,
    pub platform: Platform,
    pub topic: TopicCategory,
    pub citations: u64,
}

/// Top-k and bottom-k articles by citation count per platform.
///
/// Ties are broken by title in ascending byte order for both lists.
pub fn rank_extremes_report(corpus: &[CitationVolume], k: usize) -> Result<ExtremesReport, ScalingError> {
    let mut platforms = BTreeMap::new();
    for platform in Platform::ALL {
        let mut rows: Vec<&CitationVolume> = corpus.iter().filter(|r| r.platform == platform).collect();
        if rows.len() < 2 * k {
            return Err(ScalingError::InsufficientCorpus { platform, k, needed: 2 * k, got: rows.len() });
        }
        let to_row = |r: &&CitationVolume| ExtremeRow { title: r.title.clone(), topic: r.topic, citations: r.citations };
        rows.sort_by(|a, b| b.citations.cmp(&a.citations).then_with(|| a.title.cmp(&b.title)));
        let top: Vec<ExtremeRow> = rows.iter().take(k).map(to_row).collect();
        rows.sort_by(|a, b| a.citations.cmp(&b.citations).then_with(|| a.title.cmp(&b.title)));
        let bottom: Vec<ExtremeRow> = rows.iter().take(k).map(to_row).collect();
        let hist = |rows: &[ExtremeRow]| {
            let mut h = BTreeMap::new();
            for r in rows {
                *h.entry(r.topic).or_insert(0) += 1;
            }
            h
        };
        platforms.insert(
            platform,
            PlatformExtremes { top_topics: hist(&top), bottom_topics: hist(&bottom), top, bottom },
        );
    }
    Ok(ExtremesReport { k, platforms })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_line() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let f = fit_ols(&x, &y, 1).unwrap();
        assert!((f.coefficient("x").unwrap().estimate - 2.0).abs() < 1e-10);
        assert!((f.coefficient("intercept").unwrap().estimate - 1.0).abs() < 1e-10);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_x_is_singular() {
        assert_eq!(fit_ols(&[3.0; 5], &[1.0, 2.0, 3.0, 4.0, 5.0], 1), Err(ScalingError::SingularDesign));
    }

    #[test]
    fn too_few_points() {
        assert!(matches!(fit_ols(&[1.0, 2.0, 3.0], &[1.0, 2.0, 4.0], 2), Err(ScalingError::InsufficientData { .. })));
        assert_eq!(fit_ols(&[1.0], &[1.0], 3), Err(ScalingError::UnsupportedDegree(3)));
    }

    #[test]
    fn exact_exponential() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 100.0).collect();
        let y: Vec<f64> = x.iter().map(|v| (0.001 * v).exp()).collect();
        let f = fit_exponential(&x, &y).unwrap();
        assert!((f.coefficient("beta").unwrap().estimate - 0.001).abs() < 1e-12);
        assert!((f.coefficient("alpha").unwrap().estimate - 1.0).abs() < 1e-10);
        assert!((f.r2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_y_rejected() {
        assert_eq!(fit_exponential(&[1.0, 2.0, 3.0], &[1.0, 0.0, 2.0]), Err(ScalingError::NonpositiveY(1)));
    }

    #[test]
    fn quadratic_retained_for_parabola() {
        let x: Vec<f64> = (1..=30).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| v * v).collect();
        let s = select_scaling_model(&x, &y, 0.05).unwrap();
        assert_eq!(s.selected, ModelKind::Quadratic);
        assert!(!s.elimination_trace[0].dropped);
        assert_eq!(s.candidates.len(), 3);
    }

    #[test]
    fn extremes_small() {
        let rows: Vec<CitationVolume> = [("a", 5), ("b", 1), ("c", 9)]
            .iter()
            .flat_map(|(t, c)| {
                Platform::ALL.into_iter().map(move |p| CitationVolume {
                    title: t.to_string(),
                    platform: p,
                    topic: TopicCategory::Music,
                    citations: *c,
                })
            })
            .collect();
        let r = rank_extremes_report(&rows, 1).unwrap();
        let w = &r.platforms[&Platform::Wikipedia];
        assert_eq!(w.top[0].title, "c");
        assert_eq!(w.bottom[0].title, "b");
        assert!(matches!(rank_extremes_report(&rows, 2), Err(ScalingError::InsufficientCorpus { .. })));
    }

    #[test]
    fn extremes_tie_break_by_title() {
        let rows: Vec<CitationVolume> = ["d", "b", "c", "a"]
            .iter()
            .flat_map(|t| {
                Platform::ALL.into_iter().map(move |p| CitationVolume {
                    title: t.to_string(),
                    platform: p,
                    topic: TopicCategory::Sports,
                    citations: 7,
                })
            })
            .collect();
        let r = rank_extremes_report(&rows, 2).unwrap();
        let g = &r.platforms[&Platform::Grokipedia];
        let titles = |v: &[ExtremeRow]| v.iter().map(|r| r.title.clone()).collect::<Vec<_>>();
        assert_eq!(titles(&g.top), ["a", "b"]);
        assert_eq!(titles(&g.bottom), ["a", "b"]);
    }

    #[test]
    fn density_bins() {
        let bins = binned_density(&[1000.0, 4000.0, 6000.0, 0.0], &[10.0, 20.0, 60.0, 3.0], 5000.0);
        assert_eq!(bins.len(), 2);
        assert_eq!(bins[0].n, 2);
        assert!((bins[0].mean_density_per_1k - 7.5).abs() < 1e-12);
        assert!((bins[1].mean_density_per_1k - 10.0).abs() < 1e-12);
    }
}
