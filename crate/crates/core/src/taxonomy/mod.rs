//! Eight-way epistemic classification of citations.
//!
//! The decision tree is walked step by step. Each step is answered from
//! local evidence when possible ([`rules`]) and otherwise by an LLM client
//! driven by the shipped coding manual ([`prompt`]). Tertiary pages about a
//! single work are looked through to that work via a [`WorkResolver`].

pub mod llm;
pub mod mock;
pub mod prompt;
pub mod resolver;
pub mod rules;

use std::str::FromStr;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::EpistemicCategory;
use crate::parsing::CitationRecord;

pub use llm::{HttpLlmClient, LlmClient, LlmError};
pub use prompt::{build_classifier_prompt, build_step_prompt, parse_llm_label, ClassifierPromptAsset, MANUAL_VERSION};
pub use resolver::{CacheWorkResolver, FixtureResolver, NoLookThrough, Resolution, WorkResolver};
pub use rules::Basis;

/// Look-through recursion limit.
pub const MAX_LOOK_THROUGH_DEPTH: u8 = 2;

/// Retries after a malformed model reply.
pub const MALFORMED_RETRIES: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TaxonomyError {
    #[error("citation has neither text nor URL")]
    EmptyCitation,
    #[error("unresolvable: {0}")]
    Unresolvable(String),
    #[error("classifier client error: {0}")]
    ClientError(String),
    #[error("malformed model response: {0}")]
    MalformedResponse(String),
    #[error("look-through exceeded depth {0}")]
    ResolutionDepthExceeded(u8),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ResultSource {
    RuleEngine,
    Llm,
    HumanOverride,
}

/// Outcome of a look-through attempt.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LookThroughOutcome {
    SpecificWork,
    GeneralTopic,
    DepthExceeded,
}

/// One entry of the path taken through the tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PathStep {
    /// A decision step with its YES/NO answer.
    Step { step: u8, answer: bool, basis: Basis },
    /// Step-7 look-through branch; `depth` counts from 1.
    LookThrough { depth: u8, outcome: LookThroughOutcome },
    /// Whole-manual label request (used after an all-NO walk and in LLM-only mode).
    FullManual { code: u8 },
    Override,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationResult {
    pub citation_index: usize,
    pub category: EpistemicCategory,
    pub rule_path: Vec<PathStep>,
    pub look_through_applied: bool,
    pub source: ResultSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

impl ClassificationResult {
    /// Compact path string such as `1N 2N 3N 4Y`.
    pub fn path_string(&self) -> String {
        self.rule_path
            .iter()
            .map(|p| match p {
                PathStep::Step { step, answer, .. } => format!("{step}{}", if *answer { 'Y' } else { 'N' }),
                PathStep::LookThrough { outcome, .. } => match outcome {
                    LookThroughOutcome::SpecificWork => "LT>".into(),
                    LookThroughOutcome::GeneralTopic => "LT=".into(),
                    LookThroughOutcome::DepthExceeded => "LT!".into(),
                },
                PathStep::FullManual { code } => format!("M{code}"),
                PathStep::Override => "H".into(),
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierMode {
    /// Local evidence only; open steps make the citation unresolvable.
    Rules,
    /// Every citation goes to the model with the full manual.
    Llm,
    /// Local evidence first, model for open steps.
    Hybrid,
}

impl FromStr for ClassifierMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rules" => Ok(Self::Rules),
            "llm" | "llm-all" => Ok(Self::Llm),
            "hybrid" => Ok(Self::Hybrid),
            other => Err(format!("unknown classifier mode `{other}`")),
        }
    }
}

/// Classifier configuration plus collaborators.
#[derive(Clone)]
pub struct Classifier {
    pub mode: ClassifierMode,
    pub asset: ClassifierPromptAsset,
    pub client: Option<Arc<dyn LlmClient>>,
    pub resolver: Arc<dyn WorkResolver>,
    pub max_inflight: usize,
}

impl Classifier {
    pub fn new(mode: ClassifierMode, client: Option<Arc<dyn LlmClient>>, resolver: Arc<dyn WorkResolver>) -> Self {
        Self { mode, asset: ClassifierPromptAsset::shipped(), client, resolver, max_inflight: 4 }
    }

    pub fn model_name(&self) -> Option<&str> {
        self.client.as_deref().map(|c| c.model())
    }

    pub fn classify(&self, c: &CitationRecord) -> Result<ClassificationResult, TaxonomyError> {
        if c.raw_text.trim().is_empty() && c.urls.is_empty() {
            return Err(TaxonomyError::EmptyCitation);
        }
        let client = match self.mode {
            ClassifierMode::Rules => None,
            _ => self.client.as_deref(),
        };
        if self.mode != ClassifierMode::Rules && client.is_none() {
            return Err(TaxonomyError::ClientError("no model client configured".into()));
        }
        if self.mode == ClassifierMode::Llm {
            let client = client.expect("checked above");
            let (category, confidence) = full_manual(client, &self.asset, c)?;
            return Ok(ClassificationResult {
                citation_index: c.index,
                category,
                rule_path: vec![PathStep::FullManual { code: category.code() }],
                look_through_applied: false,
                source: ResultSource::Llm,
                confidence,
            });
        }
        walk_tree(&self.asset, client, self.resolver.as_ref(), c)
    }

    /// Classifies many citations with at most `max_inflight` in flight.
    /// Results come back in input order.
    pub fn classify_all(&self, items: &[CitationRecord]) -> Vec<Result<ClassificationResult, TaxonomyError>> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(self.max_inflight.max(1))
            .build()
            .expect("classifier pool");
        pool.install(|| items.par_iter().map(|c| self.classify(c)).collect())
    }
}

fn full_manual(
    client: &dyn LlmClient,
    asset: &ClassifierPromptAsset,
    c: &CitationRecord,
) -> Result<(EpistemicCategory, Option<f64>), TaxonomyError> {
    let prompt = build_classifier_prompt(asset, c);
    match llm::ask(client, &prompt, MALFORMED_RETRIES, parse_llm_label) {
        llm::Retried::Ok(v) => Ok(v),
        llm::Retried::Malformed(m) => Err(TaxonomyError::Unresolvable(m)),
        llm::Retried::Failed(e) => Err(TaxonomyError::ClientError(e)),
    }
}

struct Walk<'a> {
    asset: &'a ClassifierPromptAsset,
    client: Option<&'a dyn LlmClient>,
    resolver: &'a dyn WorkResolver,
    path: Vec<PathStep>,
    used_llm: bool,
}

impl Walk<'_> {
    fn answer(&mut self, c: &CitationRecord, ev: &rules::Evidence, step: u8) -> Result<bool, TaxonomyError> {
        if let Some((answer, basis)) = ev.answer(step) {
            self.path.push(PathStep::Step { step, answer, basis });
            return Ok(answer);
        }
        let Some(client) = self.client else {
            return Err(TaxonomyError::Unresolvable(format!("step {step} needs a model and none is configured")));
        };
        self.used_llm = true;
        let prompt = build_step_prompt(self.asset, c, step);
        let answer = match llm::ask(client, &prompt, MALFORMED_RETRIES, prompt::parse_yes_no) {
            llm::Retried::Ok(a) => a,
            llm::Retried::Malformed(m) => return Err(TaxonomyError::Unresolvable(m)),
            llm::Retried::Failed(e) => return Err(TaxonomyError::ClientError(e)),
        };
        self.path.push(PathStep::Step { step, answer, basis: Basis::Llm });
        Ok(answer)
    }

    fn run(&mut self, c: &CitationRecord, depth: u8) -> Result<(EpistemicCategory, Option<f64>), TaxonomyError> {
        let ev = rules::evidence(c);
        for step in 1..=8u8 {
            if !self.answer(c, &ev, step)? {
                continue;
            }
            if step == 7 {
                if depth >= MAX_LOOK_THROUGH_DEPTH {
                    self.path.push(PathStep::LookThrough { depth: depth + 1, outcome: LookThroughOutcome::DepthExceeded });
                    return Ok((EpistemicCategory::ReferenceTertiary, None));
                }
                return match self.resolver.resolve(c) {
                    Resolution::SpecificWork(work) => {
                        self.path.push(PathStep::LookThrough { depth: depth + 1, outcome: LookThroughOutcome::SpecificWork });
                        let work = CitationRecord { index: c.index, ..work };
                        self.run(&work, depth + 1)
                    }
                    Resolution::GeneralTopic => {
                        self.path.push(PathStep::LookThrough { depth: depth + 1, outcome: LookThroughOutcome::GeneralTopic });
                        Ok((EpistemicCategory::ReferenceTertiary, None))
                    }
                };
            }
            return Ok((EpistemicCategory::from_index(step as usize - 1).expect("step 1-8"), None));
        }
        // every step answered NO: only reachable through model answers
        let client = self.client.ok_or_else(|| TaxonomyError::Unresolvable("no step matched".into()))?;
        let (category, confidence) = full_manual(client, self.asset, c)?;
        self.path.push(PathStep::FullManual { code: category.code() });
        Ok((category, confidence))
    }
}

fn walk_tree(
    asset: &ClassifierPromptAsset,
    client: Option<&dyn LlmClient>,
    resolver: &dyn WorkResolver,
    c: &CitationRecord,
) -> Result<ClassificationResult, TaxonomyError> {
    let mut walk = Walk { asset, client, resolver, path: Vec::new(), used_llm: false };
    let (category, confidence) = walk.run(c, 0)?;
    let look_through_applied = walk
        .path
        .iter()
        .any(|p| matches!(p, PathStep::LookThrough { outcome: LookThroughOutcome::SpecificWork, .. }));
    Ok(ClassificationResult {
        citation_index: c.index,
        category,
        rule_path: walk.path,
        look_through_applied,
        source: if walk.used_llm { ResultSource::Llm } else { ResultSource::RuleEngine },
        confidence,
    })
}

/// Walks the tree in hybrid mode (rules alone when `client` is `None`).
pub fn classify_citation(
    c: &CitationRecord,
    resolver: &dyn WorkResolver,
    client: Option<&dyn LlmClient>,
) -> Result<ClassificationResult, TaxonomyError> {
    if c.raw_text.trim().is_empty() && c.urls.is_empty() {
        return Err(TaxonomyError::EmptyCitation);
    }
    walk_tree(&ClassifierPromptAsset::shipped(), client, resolver, c)
}

/// Resolves a tertiary citation one level: the underlying work, or the
/// record unchanged when the page covers a general topic.
pub fn apply_look_through(c: &CitationRecord, resolver: &dyn WorkResolver) -> (CitationRecord, LookThroughOutcome) {
    match resolver.resolve(c) {
        Resolution::SpecificWork(w) => (CitationRecord { index: c.index, ..w }, LookThroughOutcome::SpecificWork),
        Resolution::GeneralTopic => (c.clone(), LookThroughOutcome::GeneralTopic),
    }
}
