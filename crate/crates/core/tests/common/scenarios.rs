//! Seeded simulation scenarios shared by the unit-level and acceptance targets.

use std::collections::BTreeSet;

use epiaudit::networks::{homophily_graph, CategoryEdge, CategoryGraph, ProfiledArticle};
use epiaudit::scaling::{select_scaling_model, ModelKind};
use epiaudit::{EpistemicCategory, TopicCategory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

pub const TRUE_SLOPE: f64 = 0.021;

#[derive(Debug, Clone, Copy, Default)]
pub struct Recovery {
    pub trials: usize,
    pub linear_selected: usize,
    pub slope_covered: usize,
}

/// Replicates y = 0.021 x + N(0, 30) on 72 points and counts how often the
/// quadratic term is dropped and the slope interval covers the truth.
pub fn slope_recovery(seed: u64, trials: usize) -> Recovery {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let words = Uniform::new(3000.0, 30000.0);
    let noise = Normal::new(0.0, 30.0).unwrap();
    let mut out = Recovery { trials, ..Default::default() };
    for _ in 0..trials {
        let x: Vec<f64> = (0..72).map(|_| words.sample(&mut rng)).collect();
        let y: Vec<f64> = x.iter().map(|v| TRUE_SLOPE * v + noise.sample(&mut rng)).collect();
        let sel = select_scaling_model(&x, &y, 0.05).unwrap();
        if sel.selected == ModelKind::Linear {
            out.linear_selected += 1;
        }
        let (lo, hi) = sel.fit(ModelKind::Linear).unwrap().ci95("x").unwrap();
        if lo <= TRUE_SLOPE && TRUE_SLOPE <= hi {
            out.slope_covered += 1;
        }
    }
    out
}

/// Three-edge category graph with weights 1, 2 and 3.
pub fn weights_123() -> CategoryGraph {
    use EpistemicCategory::*;
    let edges = [(Academic, News, 1.0), (News, Opinion, 2.0), (Academic, Ugc, 3.0)]
        .into_iter()
        .map(|(source, target, weight)| CategoryEdge { source, target, weight })
        .collect();
    CategoryGraph::from_edges(edges, &BTreeSet::new())
}

pub fn random_articles(rng: &mut ChaCha8Rng, n: usize) -> Vec<ProfiledArticle> {
    (0..n)
        .map(|i| {
            let topic = TopicCategory::ALL[rng.gen_range(0..6)];
            let mut v = [0.0; 8];
            // topic-biased profile so some edges are homophilous
            for (j, x) in v.iter_mut().enumerate() {
                let bias = if j % 6 == topic.index() { 3.0 } else { 1.0 };
                *x = if rng.gen_bool(0.25) { 0.0 } else { bias * rng.gen::<f64>() };
            }
            v[topic.index()] += 0.1;
            (format!("a{i}"), topic, v)
        })
        .collect()
}

/// Edge counts at 0.65, 0.75 and 0.85 for `trials` random article sets.
pub fn homophily_edge_counts(seed: u64, trials: usize) -> Vec<[usize; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let n = rng.gen_range(10..60);
            let arts = random_articles(&mut rng, n);
            [0.65, 0.75, 0.85].map(|t| homophily_graph(&arts, t).unwrap().edges.len())
        })
        .collect()
}
