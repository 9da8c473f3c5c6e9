use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::slot::TemplateSlot;
use super::GenerateError;
use crate::engine::{BindingMatcher, QType, Question, QuestionBank, Selector};
use crate::json;
use crate::library::ClauseLibrary;
use crate::lint::LintIssue;

pub const SECTION_COUNT: usize = 10;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TemplateSection {
    pub index: usize,
    pub heading: String,
    /// Static text shown at the top of the section.
    #[serde(default)]
    pub guide: String,
    #[serde(default)]
    pub slots: Vec<TemplateSlot>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyTemplate {
    #[serde(default)]
    pub version: String,
    #[serde(default = "default_title")]
    pub title: String,
    pub sections: Vec<TemplateSection>,
}

fn default_title() -> String {
    "Privacy Policy".into()
}

/// Bindings of `q` that fire for an answer taking `selector`.
fn bound_clauses(q: &Question, selector: Selector) -> BTreeSet<&str> {
    q.clause_bindings
        .iter()
        .filter(|b| {
            matches!(
                (selector, &b.on),
                (Selector::Yes, BindingMatcher::Yes)
                    | (Selector::No, BindingMatcher::No)
                    | (Selector::Any, BindingMatcher::Answered | BindingMatcher::Option(_))
            )
        })
        .flat_map(|b| b.clauses.iter().map(String::as_str))
        .collect()
}

impl PolicyTemplate {
    /// Parses a template and checks it against its companion bank.
    pub fn load(source: &[u8], bank: &QuestionBank) -> Result<Self, GenerateError> {
        let template: PolicyTemplate = json::from_slice(source)?;
        template.validate(bank)?;
        Ok(template)
    }

    pub fn validate(&self, bank: &QuestionBank) -> Result<(), GenerateError> {
        if self.sections.len() != SECTION_COUNT {
            return Err(GenerateError::Template(format!(
                "template has {} sections, expected {SECTION_COUNT}",
                self.sections.len()
            )));
        }
        for (i, section) in self.sections.iter().enumerate() {
            if section.index != i + 1 {
                return Err(GenerateError::Template(format!(
                    "section at position {} has index {}",
                    i + 1,
                    section.index
                )));
            }
            for slot in &section.slots {
                check_slot(slot, bank).map_err(|reason| GenerateError::SlotMismatch {
                    slot: slot.to_string(),
                    reason,
                })?;
            }
        }
        Ok(())
    }

    /// Every clause a slot names must exist in `lib`.
    pub fn check_library(&self, lib: &ClauseLibrary) -> Result<(), GenerateError> {
        for slot in self.slots() {
            if let Some(id) = slot.clauses.iter().find(|id| lib.get(id).is_none()) {
                return Err(GenerateError::UnknownClause(id.clone()));
            }
        }
        Ok(())
    }

    pub fn slots(&self) -> impl Iterator<Item = &TemplateSlot> {
        self.sections.iter().flat_map(|s| s.slots.iter())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("template serializes")
    }

    /// Non-fatal findings: bound clauses with no slot, and clauses placed by more than one slot.
    pub fn lint(&self, bank: &QuestionBank) -> Vec<LintIssue> {
        let mut issues = Vec::new();
        let mut placed: BTreeMap<(&str, &str), usize> = BTreeMap::new();
        let mut by_clause: BTreeMap<&str, usize> = BTreeMap::new();
        for slot in self.slots() {
            for c in &slot.clauses {
                *placed.entry((slot.qnum.as_str(), c.as_str())).or_default() += 1;
                *by_clause.entry(c.as_str()).or_default() += 1;
            }
        }
        for q in bank.questions() {
            for b in &q.clause_bindings {
                for c in &b.clauses {
                    if !placed.contains_key(&(q.qnum.as_str(), c.as_str())) {
                        issues.push(LintIssue::warning(
                            "unplaced-clause",
                            &q.qnum,
                            format!("clause {c} bound by {} has no template slot", q.qnum),
                        ));
                    }
                }
            }
        }
        for (c, n) in by_clause {
            if n > 1 {
                issues.push(LintIssue::note(
                    "duplicate-slot-clause",
                    c,
                    format!("clause {c} is placed by {n} slots; only the first occurrence renders"),
                ));
            }
        }
        issues
    }
}

fn check_slot(slot: &TemplateSlot, bank: &QuestionBank) -> Result<(), String> {
    let q = bank
        .get(&slot.qnum)
        .ok_or_else(|| format!("{} is not in the bank", slot.qnum))?;
    if q.qtype != slot.qtype {
        return Err(format!("{} is {}, slot says {}", q.qnum, q.qtype, slot.qtype));
    }
    let edge = match q.qtype {
        QType::Bool => slot.selector,
        QType::Info | QType::Mtpc => Selector::Any,
    };
    if q.flow.edge(edge) != Some(&slot.next) {
        return Err(format!("{}/{} does not lead to {}", q.qnum, edge, slot.next));
    }
    if slot.placeholder.is_some() && slot.placeholder != q.placeholder {
        return Err(format!("{} does not capture that placeholder", q.qnum));
    }
    let bound = bound_clauses(q, slot.selector);
    if let Some(c) = slot.clauses.iter().find(|c| !bound.contains(c.as_str())) {
        return Err(format!("{} does not bind {c} on {}", q.qnum, slot.selector));
    }
    Ok(())
}
