//! Label files for agreement checks.
//!
//! Two-rater files are CSV with `id,label` columns. Rater matrices are CSV
//! with an item column followed by one column per rater; `-` or an empty
//! cell marks a missing label. Labels may be wire codes, identifiers such
//! as `NEWS`, or display names.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::agreement::{
    agreement_report, krippendorff_alpha, AgreementError, AgreementReport, AlphaResult, DifferenceMetric, LabelMatrix,
};
use crate::model::EpistemicCategory;

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("{path} line {line}: {message}")]
    Bad { path: PathBuf, line: usize, message: String },
    #[error("duplicate id `{0}`")]
    Duplicate(String),
    #[error("no ids shared between reference and prediction")]
    NoOverlap,
    #[error(transparent)]
    Agreement(#[from] AgreementError),
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c == "-" || c.eq_ignore_ascii_case("na")
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, LabelError> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| LabelError::Read { path: path.into(), message: e.to_string() })
}

/// Reads an `id,label` file. Missing labels are kept as `None`.
pub fn load_labels(path: &Path) -> Result<BTreeMap<String, Option<EpistemicCategory>>, LabelError> {
    let mut out = BTreeMap::new();
    for (i, rec) in reader(path)?.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| LabelError::Bad { path: path.into(), line, message: e.to_string() })?;
        let id = rec.get(0).unwrap_or("").to_string();
        let cell = rec.get(1).unwrap_or("");
        let label = if is_missing(cell) {
            None
        } else {
            Some(cell.parse().map_err(|message| LabelError::Bad { path: path.into(), line, message })?)
        };
        if out.insert(id.clone(), label).is_some() {
            return Err(LabelError::Duplicate(id));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedAgreement {
    pub report: AgreementReport,
    /// Ids present in only one file or unlabeled on either side.
    pub unmatched: usize,
}

/// Aligns two label files on id and compares the labels both carry.
pub fn compare_label_files(reference: &Path, predicted: &Path) -> Result<PairedAgreement, LabelError> {
    let r = load_labels(reference)?;
    let p = load_labels(predicted)?;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (id, rl) in &r {
        if let (Some(rl), Some(Some(pl))) = (rl, p.get(id)) {
            a.push(*rl);
            b.push(*pl);
        }
    }
    if a.is_empty() {
        return Err(LabelError::NoOverlap);
    }
    let union = r.keys().chain(p.keys().filter(|k| !r.contains_key(*k))).count();
    Ok(PairedAgreement { report: agreement_report(&a, &b)?, unmatched: union - a.len() })
}

fn parse_cell(cell: &str) -> Result<Option<u32>, String> {
    if is_missing(cell) {
        return Ok(None);
    }
    if let Ok(n) = cell.trim().parse::<u32>() {
        return Ok(Some(n));
    }
    cell.parse::<EpistemicCategory>().map(|c| Some(u32::from(c.code())))
}

/// Reads an items-by-raters matrix.
pub fn load_matrix(path: &Path) -> Result<LabelMatrix, LabelError> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| LabelError::Read { path: path.into(), message: e.to_string() })?.clone();
    let raters: Vec<String> = header.iter().skip(1).map(String::from).collect();
    let mut items = Vec::new();
    let mut labels = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| LabelError::Bad { path: path.into(), line, message: e.to_string() })?;
        items.push(rec.get(0).unwrap_or("").to_string());
        let row = rec
            .iter()
            .skip(1)
            .map(parse_cell)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|message| LabelError::Bad { path: path.into(), line, message })?;
        labels.push(row);
    }
    Ok(LabelMatrix::new(items, raters, labels)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixAgreement {
    pub items: usize,
    pub raters: usize,
    pub metric: DifferenceMetric,
    pub alpha: AlphaResult,
}

pub fn matrix_agreement(path: &Path, metric: DifferenceMetric) -> Result<MatrixAgreement, LabelError> {
    let m = load_matrix(path)?;
    Ok(MatrixAgreement { items: m.items.len(), raters: m.raters.len(), metric, alpha: krippendorff_alpha(&m, metric)? })
}
