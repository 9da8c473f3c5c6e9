//! Coverage checklist: topics rated Y (covered), N (missing) or W (needs review).

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::presence::{MetadataPresence, Vocabulary};
use super::EvalError;
use crate::json;
use crate::library::MetadataPath;

pub const CHECKLIST_CATEGORIES: [&str; 10] = [
    "General information",
    "Personal data collection",
    "Personal data use",
    "Personal data storage",
    "Personal data transfer",
    "Individual rights",
    "Children's data",
    "Complaint handling",
    "Personal data protection",
    "Contact information",
];

/// One piece of evidence; a topic is covered when any of its evidence holds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Evidence {
    Path(MetadataPath),
    /// A condition fact that is known to be true.
    Fact(String),
}

impl Evidence {
    pub fn holds(&self, p: &MetadataPresence) -> bool {
        match self {
            Evidence::Path(path) => p.identifies(path),
            Evidence::Fact(name) => p.fact(name) == Some(true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageTopic {
    pub id: String,
    /// 1 to 10, see [`CHECKLIST_CATEGORIES`].
    pub category: u8,
    pub description: String,
    #[serde(default)]
    pub evidence: Vec<Evidence>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoverageRating {
    Y,
    N,
    W,
}

pub fn load_checklist(source: &[u8], vocab: &Vocabulary) -> Result<Vec<CoverageTopic>, EvalError> {
    let topics: Vec<CoverageTopic> = json::from_slice(source)?;
    let mut seen = BTreeSet::new();
    for t in &topics {
        if !seen.insert(t.id.as_str()) {
            return Err(EvalError::DuplicateId(t.id.clone()));
        }
        if !(1..=10).contains(&t.category) {
            return Err(EvalError::BadCategory {
                topic: t.id.clone(),
                category: t.category,
            });
        }
        for e in &t.evidence {
            match e {
                Evidence::Path(p) => vocab.check_path(p)?,
                Evidence::Fact(f) => vocab.check_fact(f)?,
            }
        }
    }
    Ok(topics)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicResult {
    pub id: String,
    pub category: u8,
    pub rating: CoverageRating,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub ratings: Vec<TopicResult>,
    pub covered_count: usize,
}

impl CoverageReport {
    pub fn rating(&self, id: &str) -> Option<CoverageRating> {
        self.ratings.iter().find(|r| r.id == id).map(|r| r.rating)
    }
}

pub fn rate_topic(topic: &CoverageTopic, p: &MetadataPresence, review_flags: &BTreeSet<String>) -> CoverageRating {
    if topic.evidence.iter().any(|e| e.holds(p)) {
        CoverageRating::Y
    } else if review_flags.contains(&topic.id) {
        CoverageRating::W
    } else {
        CoverageRating::N
    }
}

pub fn evaluate_coverage(
    checklist: &[CoverageTopic],
    p: &MetadataPresence,
    review_flags: &BTreeSet<String>,
) -> CoverageReport {
    let ratings: Vec<TopicResult> = checklist
        .iter()
        .map(|t| TopicResult {
            id: t.id.clone(),
            category: t.category,
            rating: rate_topic(t, p, review_flags),
        })
        .collect();
    let covered_count = ratings.iter().filter(|r| r.rating == CoverageRating::Y).count();
    CoverageReport { ratings, covered_count }
}
