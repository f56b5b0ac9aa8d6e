//! Category co-occurrence backbones and article homophily graphs.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::divergence::cosine_similarity;
use crate::model::{EpistemicCategory, TopicCategory, CATEGORY_COUNT};
use crate::profiles::EpistemicProfile;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("graph has no edges")]
    NoEdges,
    #[error("no edge weight exceeds the mean ({mean}); backbone is empty")]
    EmptyBackbone { mean: f64 },
    #[error("need at least {needed} articles, got {got}")]
    TooFewArticles { needed: usize, got: usize },
    #[error("threshold {0} outside (0, 1)")]
    InvalidThreshold(f64),
    #[error("article `{0}` has an all-zero profile")]
    ZeroProfile(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryEdge {
    pub source: EpistemicCategory,
    pub target: EpistemicCategory,
    pub weight: f64,
}

/// Undirected weighted graph over epistemic categories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryGraph {
    pub nodes: Vec<EpistemicCategory>,
    pub edges: Vec<CategoryEdge>,
    pub node_strength: BTreeMap<EpistemicCategory, f64>,
}

impl CategoryGraph {
    /// Builds a graph from edges, dropping non-positive weights; nodes are
    /// the endpoints of surviving edges plus any extra nodes given.
    pub fn from_edges(edges: Vec<CategoryEdge>, extra_nodes: &BTreeSet<EpistemicCategory>) -> Self {
        let edges: Vec<CategoryEdge> = edges.into_iter().filter(|e| e.weight > 0.0).collect();
        let mut nodes: BTreeSet<EpistemicCategory> = extra_nodes.clone();
        let mut node_strength: BTreeMap<EpistemicCategory, f64> = BTreeMap::new();
        for e in &edges {
            nodes.insert(e.source);
            nodes.insert(e.target);
            *node_strength.entry(e.source).or_default() += e.weight;
            *node_strength.entry(e.target).or_default() += e.weight;
        }
        for n in &nodes {
            node_strength.entry(*n).or_default();
        }
        Self { nodes: nodes.into_iter().collect(), edges, node_strength }
    }

    pub fn weight(&self, a: EpistemicCategory, b: EpistemicCategory) -> Option<f64> {
        self.edges
            .iter()
            .find(|e| (e.source == a && e.target == b) || (e.source == b && e.target == a))
            .map(|e| e.weight)
    }

    pub fn mean_weight(&self) -> Option<f64> {
        (!self.edges.is_empty())
            .then(|| self.edges.iter().map(|e| e.weight).sum::<f64>() / self.edges.len() as f64)
    }
}

fn category_pairs() -> impl Iterator<Item = (EpistemicCategory, EpistemicCategory)> {
    (0..CATEGORY_COUNT).flat_map(|i| {
        ((i + 1)..CATEGORY_COUNT).map(move |j| (EpistemicCategory::ALL[i], EpistemicCategory::ALL[j]))
    })
}

/// Edge weight = number of articles citing both categories at least once.
pub fn co_occurrence_graph(profiles: &[&EpistemicProfile]) -> CategoryGraph {
    let present: BTreeSet<EpistemicCategory> = profiles
        .iter()
        .flat_map(|p| EpistemicCategory::ALL.into_iter().filter(|c| p.has(*c)))
        .collect();
    let edges = category_pairs()
        .map(|(a, b)| CategoryEdge {
            source: a,
            target: b,
            weight: profiles.iter().filter(|p| p.has(a) && p.has(b)).count() as f64,
        })
        .collect();
    CategoryGraph::from_edges(edges, &present)
}

/// A graph before and after strict mean-threshold filtering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Backbone {
    pub threshold: f64,
    pub full: CategoryGraph,
    pub filtered: CategoryGraph,
}

fn strict_filter(g: &CategoryGraph, threshold: f64) -> CategoryGraph {
    let kept = g.edges.iter().filter(|e| e.weight > threshold).cloned().collect();
    // isolated nodes are dropped
    CategoryGraph::from_edges(kept, &BTreeSet::new())
}

/// Keeps edges strictly heavier than the mean weight of existing edges.
pub fn mean_filter_backbone(g: &CategoryGraph) -> Result<Backbone, NetworkError> {
    let mean = g.mean_weight().ok_or(NetworkError::NoEdges)?;
    let filtered = strict_filter(g, mean);
    if filtered.edges.is_empty() {
        return Err(NetworkError::EmptyBackbone { mean });
    }
    Ok(Backbone { threshold: mean, full: g.clone(), filtered })
}

/// Category-category cosine similarity over binary presence columns.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineBackbone {
    /// Similarity for every pair of non-empty categories, including zeros.
    pub similarities: Vec<CategoryEdge>,
    pub mean_similarity: f64,
    pub backbone: Backbone,
    /// Categories present in no article (zero columns), left out of all pairs.
    pub excluded: Vec<EpistemicCategory>,
}

pub fn category_cosine_backbone(profiles: &[&EpistemicProfile]) -> Result<CosineBackbone, NetworkError> {
    if profiles.len() < 2 {
        return Err(NetworkError::TooFewArticles { needed: 2, got: profiles.len() });
    }
    let columns: Vec<Vec<f64>> = EpistemicCategory::ALL
        .into_iter()
        .map(|c| profiles.iter().map(|p| if p.has(c) { 1.0 } else { 0.0 }).collect())
        .collect();
    let excluded: Vec<EpistemicCategory> = EpistemicCategory::ALL
        .into_iter()
        .filter(|c| columns[c.index()].iter().all(|v| *v == 0.0))
        .collect();
    let similarities: Vec<CategoryEdge> = category_pairs()
        .filter(|(a, b)| !excluded.contains(a) && !excluded.contains(b))
        .map(|(a, b)| CategoryEdge {
            source: a,
            target: b,
            weight: cosine_similarity(&columns[a.index()], &columns[b.index()])
                .expect("non-zero columns"),
        })
        .collect();
    if similarities.is_empty() {
        return Err(NetworkError::NoEdges);
    }
    let mean = similarities.iter().map(|e| e.weight).sum::<f64>() / similarities.len() as f64;
    let full = CategoryGraph::from_edges(similarities.clone(), &BTreeSet::new());
    let filtered = strict_filter(&full, mean);
    if filtered.edges.is_empty() {
        return Err(NetworkError::EmptyBackbone { mean });
    }
    Ok(CosineBackbone {
        similarities,
        mean_similarity: mean,
        backbone: Backbone { threshold: mean, full, filtered },
        excluded,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleNode {
    pub id: String,
    pub topic: TopicCategory,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleEdge {
    pub source: usize,
    pub target: usize,
    pub similarity: f64,
}

/// Articles joined when their profile cosine similarity exceeds a threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticleGraph {
    pub threshold: f64,
    pub nodes: Vec<ArticleNode>,
    pub edges: Vec<ArticleEdge>,
}

impl ArticleGraph {
    pub fn degree(&self, node: usize) -> usize {
        self.edges.iter().filter(|e| e.source == node || e.target == node).count()
    }
}

/// Input row for homophily graphs: article id, topic, profile vector.
pub type ProfiledArticle = (String, TopicCategory, [f64; CATEGORY_COUNT]);

pub fn homophily_graph(articles: &[ProfiledArticle], threshold: f64) -> Result<ArticleGraph, NetworkError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(NetworkError::InvalidThreshold(threshold));
    }
    let mut edges = Vec::new();
    for i in 0..articles.len() {
        for j in (i + 1)..articles.len() {
            let sim = cosine_similarity(&articles[i].2, &articles[j].2).map_err(|_| {
                let bad = if articles[i].2.iter().all(|v| *v == 0.0) { i } else { j };
                NetworkError::ZeroProfile(articles[bad].0.clone())
            })?;
            if sim > threshold {
                edges.push(ArticleEdge { source: i, target: j, similarity: sim });
            }
        }
    }
    Ok(ArticleGraph {
        threshold,
        nodes: articles.iter().map(|(id, t, _)| ArticleNode { id: id.clone(), topic: *t }).collect(),
        edges,
    })
}

fn edge_end_matrix(g: &ArticleGraph) -> [[f64; 6]; 6] {
    let mut m = [[0.0; 6]; 6];
    for e in &g.edges {
        let a = g.nodes[e.source].topic.index();
        let b = g.nodes[e.target].topic.index();
        m[a][b] += 1.0;
        m[b][a] += 1.0;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Assortativity {
    pub r: f64,
    /// Set when every edge end falls in one class and r is fixed at 1.
    pub degenerate: bool,
}

/// Newman's discrete assortativity coefficient over topic labels.
pub fn assortativity(g: &ArticleGraph) -> Result<Assortativity, NetworkError> {
    if g.edges.is_empty() {
        return Err(NetworkError::NoEdges);
    }
    let m = edge_end_matrix(g);
    let total: f64 = m.iter().flatten().sum();
    let mut trace = 0.0;
    let mut ab = 0.0;
    for i in 0..6 {
        trace += m[i][i] / total;
        let a: f64 = m[i].iter().sum::<f64>() / total;
        let b: f64 = (0..6).map(|r| m[r][i]).sum::<f64>() / total;
        ab += a * b;
    }
    let denom = 1.0 - ab;
    if denom.abs() < 1e-15 {
        return Ok(Assortativity { r: 1.0, degenerate: true });
    }
    Ok(Assortativity { r: ((trace - ab) / denom).clamp(-1.0, 1.0), degenerate: false })
}

/// Row-normalized topic mixing matrix; rows for topics without edges are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingMatrix {
    pub topics: Vec<TopicCategory>,
    pub counts: Vec<Vec<f64>>,
    pub probs: Vec<Option<Vec<f64>>>,
}

impl MixingMatrix {
    pub fn isolated_topics(&self) -> Vec<TopicCategory> {
        self.topics.iter().zip(&self.probs).filter(|(_, p)| p.is_none()).map(|(t, _)| *t).collect()
    }
}

pub fn mixing_matrix(g: &ArticleGraph) -> Result<MixingMatrix, NetworkError> {
    if g.edges.is_empty() {
        return Err(NetworkError::NoEdges);
    }
    let m = edge_end_matrix(g);
    let probs = m
        .iter()
        .map(|row| {
            let s: f64 = row.iter().sum();
            (s > 0.0).then(|| row.iter().map(|v| v / s).collect())
        })
        .collect();
    Ok(MixingMatrix {
        topics: TopicCategory::ALL.to_vec(),
        counts: m.iter().map(|r| r.to_vec()).collect(),
        probs,
    })
}
