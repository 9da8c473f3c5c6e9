//! Policy evaluation: Flesch Reading Ease, completeness criteria and the coverage checklist.

mod completeness;
mod coverage;
mod presence;
mod readability;

use thiserror::Error;

pub use completeness::{
    evaluate_completeness, evaluate_criterion, load_criteria, CompletenessCriterion, CompletenessReport,
    CriterionResult, Expr, Postcondition, Rating, Strength, Tally,
};
pub use coverage::{
    evaluate_coverage, load_checklist, rate_topic, CoverageRating, CoverageReport, CoverageTopic, Evidence,
    TopicResult, CHECKLIST_CATEGORIES,
};
pub use presence::{
    presence_from_session, MetadataPresence, Vocabulary, BUILTIN_FACTS, FACT_COLLECTED_INDIRECTLY, FACT_OUTSIDE_EUROPE,
};
pub use readability::{
    count_syllables, fre_from_counts, fre_score, fre_score_with, segment, ReadabilityReport, Segmentation,
    ABBREVIATIONS, DEFAULT_WORDS_PER_MINUTE,
};

use crate::json::JsonError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("schema violation: {0}")]
    Schema(#[from] JsonError),
    #[error("text is empty")]
    EmptyText,
    #[error("{0:?} has no letters")]
    NoLetters(String),
    #[error("unregistered path {0}")]
    UnknownPath(String),
    #[error("unregistered fact {0:?}")]
    UnknownFact(String),
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("topic {topic}: category {category} is outside 1..=10")]
    BadCategory { topic: String, category: u8 },
}
