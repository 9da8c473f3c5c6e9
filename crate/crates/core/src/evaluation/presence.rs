use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::engine::{QuestionBank, Session};
use crate::json;
use crate::library::{ClauseKind, ClauseLibrary, MetadataPath, Taxonomy};

pub const FACT_OUTSIDE_EUROPE: &str = "controller located outside Europe";
pub const FACT_COLLECTED_INDIRECTLY: &str = "personal data collected indirectly";

/// Condition facts every vocabulary knows.
pub const BUILTIN_FACTS: &[&str] = &[FACT_OUTSIDE_EUROPE, FACT_COLLECTED_INDIRECTLY];

/// Names an expression or presence file may use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    taxonomy: Taxonomy,
    facts: BTreeSet<String>,
}

impl Vocabulary {
    pub fn new(taxonomy: Taxonomy, facts: impl IntoIterator<Item = String>) -> Self {
        let mut all: BTreeSet<String> = BUILTIN_FACTS.iter().map(|s| s.to_string()).collect();
        all.extend(facts);
        Self { taxonomy, facts: all }
    }

    /// The library taxonomy plus the builtin facts and any facts the bank sets.
    pub fn from_sources(lib: &ClauseLibrary, bank: Option<&QuestionBank>) -> Self {
        let facts: Vec<String> = bank
            .map(|b| b.fact_names().into_iter().map(String::from).collect())
            .unwrap_or_default();
        Self::new(lib.taxonomy().clone(), facts)
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn facts(&self) -> &BTreeSet<String> {
        &self.facts
    }

    pub fn check_path(&self, path: &MetadataPath) -> Result<(), EvalError> {
        if self.taxonomy.contains(path) {
            Ok(())
        } else {
            Err(EvalError::UnknownPath(path.to_string()))
        }
    }

    pub fn check_fact(&self, name: &str) -> Result<(), EvalError> {
        if self.facts.contains(name) {
            Ok(())
        } else {
            Err(EvalError::UnknownFact(name.to_string()))
        }
    }
}

/// Metadata types identified in a policy plus GDPR-related condition facts.
///
/// A present path also identifies all of its ancestors. A fact that is
/// absent or `null` is unknown.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataPresence {
    #[serde(default)]
    pub present: BTreeSet<MetadataPath>,
    #[serde(default)]
    pub conditions: BTreeMap<String, Option<bool>>,
}

impl MetadataPresence {
    pub fn parse(source: &[u8]) -> Result<Self, EvalError> {
        Ok(json::from_slice(source)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("presence serializes")
    }

    pub fn with_paths<I, S>(paths: I) -> Result<Self, EvalError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let present = paths
            .into_iter()
            .map(|p| {
                p.as_ref()
                    .parse::<MetadataPath>()
                    .map_err(|e| EvalError::UnknownPath(e.to_string()))
            })
            .collect::<Result<_, _>>()?;
        Ok(Self {
            present,
            conditions: BTreeMap::new(),
        })
    }

    pub fn set_fact(&mut self, name: impl Into<String>, value: Option<bool>) {
        self.conditions.insert(name.into(), value);
    }

    /// Whether `path` or any of its descendants was identified.
    pub fn identifies(&self, path: &MetadataPath) -> bool {
        self.present.iter().any(|p| p == path || path.is_ancestor_of(p))
    }

    pub fn fact(&self, name: &str) -> Option<bool> {
        self.conditions.get(name).copied().flatten()
    }

    pub fn validate(&self, vocab: &Vocabulary) -> Result<(), EvalError> {
        for p in &self.present {
            vocab.check_path(p)?;
        }
        for name in self.conditions.keys() {
            vocab.check_fact(name)?;
        }
        Ok(())
    }
}

/// Presence asserted by a session: the category of every selected standard
/// clause, plus the facts set by active answers. Unanswered facts stay unknown.
pub fn presence_from_session(session: &Session, bank: &QuestionBank, lib: &ClauseLibrary) -> MetadataPresence {
    let present = session
        .selected_clauses()
        .iter()
        .filter_map(|id| lib.get(id))
        .filter(|c| c.kind == ClauseKind::Standard)
        .map(|c| c.category.clone())
        .collect();
    let conditions = session.facts(bank).into_iter().map(|(k, v)| (k, Some(v))).collect();
    MetadataPresence { present, conditions }
}
