//! Citation-provenance audit of paired encyclopedia articles.
//!
//! The crate covers corpus acquisition and parsing, an eight-way epistemic
//! source taxonomy with rule and LLM classifiers, inter-rater agreement,
//! per-article profiles, divergence tests, category and article networks,
//! citation scaling fits, and the end-to-end pipeline behind the `audit` CLI.

pub mod acquisition;
pub mod agreement;
pub mod divergence;
pub mod model;
pub mod parsing;
pub mod pipeline;
pub mod networks;
pub mod profiles;
pub mod scaling;
pub mod special;
pub mod taxonomy;

pub use model::{EpistemicCategory, Platform, TopicCategory, CATEGORY_COUNT};
