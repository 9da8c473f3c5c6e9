use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::substitute::{resolve, substitution_map, ListStyle};
use super::template::PolicyTemplate;
use super::GenerateError;
use crate::engine::{ActiveOutputs, Selector, Session};
use crate::library::{ClauseKind, ClauseLibrary};

pub const STATIC_ORIGIN: &str = "static";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentMetadata {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generated_at: Option<String>,
    pub bank_version: String,
    pub library_version: String,
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyItem {
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bullets: Vec<String>,
    /// Clause id, or "static" for template text.
    pub origin: String,
    /// Question whose answer contributed the clause.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qnum: Option<String>,
    pub kind: ClauseKind,
}

impl PolicyItem {
    pub fn is_static(&self) -> bool {
        self.origin == STATIC_ORIGIN
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocumentSection {
    pub index: usize,
    pub heading: String,
    pub items: Vec<PolicyItem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyDocument {
    pub title: String,
    pub metadata: DocumentMetadata,
    pub sections: Vec<DocumentSection>,
    /// Placeholders left in place (lenient mode only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unresolved: Vec<String>,
}

impl PolicyDocument {
    pub fn items(&self) -> impl Iterator<Item = &PolicyItem> {
        self.sections.iter().flat_map(|s| s.items.iter())
    }

    pub fn count_kind(&self, kind: ClauseKind) -> usize {
        self.items().filter(|i| i.kind == kind).count()
    }

    pub fn has_non_compliant(&self) -> bool {
        self.count_kind(ClauseKind::NonCompliant) > 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenerateOptions {
    /// Require a completed session and fully resolved placeholders.
    pub strict: bool,
    pub list_style: ListStyle,
    /// Metadata only; never part of the policy body.
    pub generated_at: Option<String>,
}

impl GenerateOptions {
    pub fn strict() -> Self {
        Self {
            strict: true,
            ..Self::default()
        }
    }

    pub fn preview() -> Self {
        Self::default()
    }
}

/// Builds the policy from a session. Strict mode requires the interview to be completed.
pub fn generate(
    template: &PolicyTemplate,
    session: &Session,
    lib: &ClauseLibrary,
    opts: &GenerateOptions,
) -> Result<PolicyDocument, GenerateError> {
    if opts.strict && !session.is_completed() {
        return Err(GenerateError::Incomplete(session.cursor().to_string()));
    }
    generate_from_outputs(template, &session.active_outputs(), session.bank_version(), lib, opts)
}

/// The pure core of [`generate`]: the document depends only on these inputs.
pub fn generate_from_outputs(
    template: &PolicyTemplate,
    outputs: &ActiveOutputs,
    bank_version: &str,
    lib: &ClauseLibrary,
    opts: &GenerateOptions,
) -> Result<PolicyDocument, GenerateError> {
    template.check_library(lib)?;
    let values = substitution_map(outputs);
    let contributed: HashSet<(&str, Selector, &str)> = outputs
        .contributions
        .iter()
        .map(|c| (c.qnum.as_str(), c.selector, c.clause.as_str()))
        .collect();
    let mut emitted: HashSet<&str> = HashSet::new();
    let mut unresolved = BTreeSet::new();
    let mut sections = Vec::with_capacity(template.sections.len());

    for section in &template.sections {
        let mut items = Vec::new();
        if !section.guide.trim().is_empty() {
            let r = resolve(&section.guide, &values, opts.strict, opts.list_style)?;
            unresolved.extend(r.unresolved);
            items.push(PolicyItem {
                text: r.text,
                bullets: r.bullets,
                origin: STATIC_ORIGIN.into(),
                qnum: None,
                kind: ClauseKind::Standard,
            });
        }
        for slot in &section.slots {
            for id in &slot.clauses {
                if !contributed.contains(&(slot.qnum.as_str(), slot.selector, id.as_str()))
                    || emitted.contains(id.as_str())
                {
                    continue;
                }
                let clause = lib.get(id).ok_or_else(|| GenerateError::UnknownClause(id.clone()))?;
                let r = resolve(&clause.text, &values, opts.strict, opts.list_style)?;
                unresolved.extend(r.unresolved);
                emitted.insert(id);
                items.push(PolicyItem {
                    text: r.text,
                    bullets: r.bullets,
                    origin: id.clone(),
                    qnum: Some(slot.qnum.clone()),
                    kind: clause.kind,
                });
            }
        }
        sections.push(DocumentSection {
            index: section.index,
            heading: section.heading.clone(),
            items,
        });
    }

    Ok(PolicyDocument {
        title: template.title.clone(),
        metadata: DocumentMetadata {
            generated_at: opts.generated_at.clone(),
            bank_version: bank_version.to_string(),
            library_version: lib.version().to_string(),
            strict: opts.strict,
        },
        sections,
        unresolved: unresolved.into_iter().collect(),
    })
}
