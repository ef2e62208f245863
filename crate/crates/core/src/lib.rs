//! Perceptual-assessment toolkit.
//!
//! * [`taxonomy`]: domains, categories and the structure/texture lexicons
//! * [`annotation`]: structural scene annotations
//! * [`ista_score`]: deterministic structure–texture richness score
//! * [`rewards`]: answer-correctness and rating rewards
//! * [`grpo`]: clipped group-relative policy objective and gradient
//! * [`metrics`]: SRCC / PLCC and accuracy breakdowns
//! * [`curation`]: judge-based reject sampling of candidate QA pairs
//! * [`harness`]: JSONL ingestion, leaderboards and the batch CLI

pub mod annotation;
pub mod curation;
pub mod grpo;
pub mod harness;
pub mod ista_score;
pub mod metrics;
pub mod registry;
pub mod rewards;
pub mod taxonomy;
