//! Completeness criteria: `[precondition], <postcondition>` rules over metadata presence.
//!
//! Criteria file (JSON array):
//!
//! ```json
//! [{"id": "C3", "strength": "must",
//!   "precondition": {"fact": "controller located outside Europe"},
//!   "postcondition": {"any_of": ["CONTROLLER REPRESENTATIVE.IDENTITY.REGISTER NUMBER",
//!                                "CONTROLLER REPRESENTATIVE.IDENTITY.LEGAL NAME"]}}]
//! ```
//!
//! Preconditions are expressions built from `all_of`, `any_of`, `not`,
//! `present` (a path) and `fact` (a condition that must be true). They are
//! evaluated in three-valued logic; an unknown fact propagates and an unknown
//! precondition is treated as not satisfied.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::presence::{MetadataPresence, Vocabulary};
use super::EvalError;
use crate::json;
use crate::library::MetadataPath;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Expr {
    AllOf(Vec<Expr>),
    AnyOf(Vec<Expr>),
    Not(Box<Expr>),
    Present(MetadataPath),
    Fact(String),
}

impl Expr {
    /// Kleene evaluation; `None` is unknown.
    pub fn eval(&self, p: &MetadataPresence) -> Option<bool> {
        match self {
            Expr::AllOf(xs) => {
                let mut acc = Some(true);
                for x in xs {
                    match x.eval(p) {
                        Some(false) => return Some(false),
                        None => acc = None,
                        Some(true) => {}
                    }
                }
                acc
            }
            Expr::AnyOf(xs) => {
                let mut acc = Some(false);
                for x in xs {
                    match x.eval(p) {
                        Some(true) => return Some(true),
                        None => acc = None,
                        Some(false) => {}
                    }
                }
                acc
            }
            Expr::Not(x) => x.eval(p).map(|v| !v),
            Expr::Present(path) => Some(p.identifies(path)),
            Expr::Fact(name) => p.fact(name),
        }
    }

    pub fn paths(&self, out: &mut BTreeSet<MetadataPath>) {
        match self {
            Expr::AllOf(xs) | Expr::AnyOf(xs) => xs.iter().for_each(|x| x.paths(out)),
            Expr::Not(x) => x.paths(out),
            Expr::Present(path) => {
                out.insert(path.clone());
            }
            Expr::Fact(_) => {}
        }
    }

    pub fn facts(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::AllOf(xs) | Expr::AnyOf(xs) => xs.iter().for_each(|x| x.facts(out)),
            Expr::Not(x) => x.facts(out),
            Expr::Present(_) => {}
            Expr::Fact(name) => {
                out.insert(name.clone());
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Postcondition {
    AllOf(Vec<MetadataPath>),
    AnyOf(Vec<MetadataPath>),
}

impl Postcondition {
    pub fn holds(&self, p: &MetadataPresence) -> bool {
        match self {
            Postcondition::AllOf(paths) => paths.iter().all(|x| p.identifies(x)),
            Postcondition::AnyOf(paths) => paths.iter().any(|x| p.identifies(x)),
        }
    }

    pub fn paths(&self) -> &[MetadataPath] {
        match self {
            Postcondition::AllOf(paths) | Postcondition::AnyOf(paths) => paths,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strength {
    Must,
    Should,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rating {
    Satisfied,
    Unsatisfied,
    PreconditionNotSatisfied,
}

impl Rating {
    pub fn as_str(self) -> &'static str {
        match self {
            Rating::Satisfied => "satisfied",
            Rating::Unsatisfied => "unsatisfied",
            Rating::PreconditionNotSatisfied => "precondition_not_satisfied",
        }
    }
}

impl std::fmt::Display for Rating {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompletenessCriterion {
    pub id: String,
    pub strength: Strength,
    /// Human-readable statement of the rule.
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Absent means always true.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precondition: Option<Expr>,
    pub postcondition: Postcondition,
}

impl CompletenessCriterion {
    /// Every path and fact the criterion mentions must be registered.
    pub fn validate(&self, vocab: &Vocabulary) -> Result<(), EvalError> {
        let mut paths: BTreeSet<MetadataPath> = self.postcondition.paths().iter().cloned().collect();
        let mut facts = BTreeSet::new();
        if let Some(pre) = &self.precondition {
            pre.paths(&mut paths);
            pre.facts(&mut facts);
        }
        for p in &paths {
            vocab.check_path(p)?;
        }
        for f in &facts {
            vocab.check_fact(f)?;
        }
        Ok(())
    }
}

pub fn load_criteria(source: &[u8], vocab: &Vocabulary) -> Result<Vec<CompletenessCriterion>, EvalError> {
    let criteria: Vec<CompletenessCriterion> = json::from_slice(source)?;
    let mut seen = BTreeSet::new();
    for c in &criteria {
        if !seen.insert(c.id.as_str()) {
            return Err(EvalError::DuplicateId(c.id.clone()));
        }
        c.validate(vocab)?;
    }
    Ok(criteria)
}

/// Rates one criterion. Names are checked against `vocab` first.
pub fn evaluate_criterion(
    c: &CompletenessCriterion,
    p: &MetadataPresence,
    vocab: &Vocabulary,
) -> Result<Rating, EvalError> {
    c.validate(vocab)?;
    Ok(rate(c, p))
}

pub(crate) fn rate(c: &CompletenessCriterion, p: &MetadataPresence) -> Rating {
    let pre = c.precondition.as_ref().map_or(Some(true), |e| e.eval(p));
    if pre != Some(true) {
        Rating::PreconditionNotSatisfied
    } else if c.postcondition.holds(p) {
        Rating::Satisfied
    } else {
        Rating::Unsatisfied
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: String,
    pub strength: Strength,
    pub rating: Rating,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tally {
    pub satisfied: usize,
    pub unsatisfied: usize,
    pub precondition_not_satisfied: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletenessReport {
    /// In criteria order.
    pub ratings: Vec<CriterionResult>,
    pub complete: bool,
    pub tally: Tally,
}

impl CompletenessReport {
    pub fn rating(&self, id: &str) -> Option<Rating> {
        self.ratings.iter().find(|r| r.id == id).map(|r| r.rating)
    }
}

/// Complete iff no must-strength criterion is unsatisfied.
pub fn evaluate_completeness(
    criteria: &[CompletenessCriterion],
    p: &MetadataPresence,
    vocab: &Vocabulary,
) -> Result<CompletenessReport, EvalError> {
    p.validate(vocab)?;
    let mut tally = Tally::default();
    let mut ratings = Vec::with_capacity(criteria.len());
    for c in criteria {
        let rating = evaluate_criterion(c, p, vocab)?;
        match rating {
            Rating::Satisfied => tally.satisfied += 1,
            Rating::Unsatisfied => tally.unsatisfied += 1,
            Rating::PreconditionNotSatisfied => tally.precondition_not_satisfied += 1,
        }
        ratings.push(CriterionResult {
            id: c.id.clone(),
            strength: c.strength,
            rating,
        });
    }
    let complete = !ratings
        .iter()
        .any(|r| r.strength == Strength::Must && r.rating == Rating::Unsatisfied);
    Ok(CompletenessReport {
        ratings,
        complete,
        tally,
    })
}
