//! Clause library: the metadata taxonomy plus reusable privacy clauses.
//!
//! A library document is UTF-8 JSON:
//!
//! ```json
//! {
//!   "version": "1",
//!   "expected_categories": 56,
//!   "taxonomy": [["CONTROLLER", "IDENTITY", "LEGAL NAME"], ...],
//!   "clauses": [{"id": "C4", "category": "CONTROLLER.IDENTITY.REGISTER NUMBER",
//!                "kind": "standard", "text": "...", "source": "..."}]
//! }
//! ```
//!
//! Taxonomy entries list leaves; their ancestors are implied. Clauses of kind
//! `non_compliant` or `warning` live under the reserved `COMPLIANCE` root.

mod lint;
pub mod placeholder;
mod taxonomy;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lint::{lint_library, ClauseCoverageGroup, CONTROLLER_COVERAGE_GROUPS};
pub use placeholder::{extract_placeholders, PlaceholderError};
pub use taxonomy::{MetadataPath, MetadataType, Taxonomy, COMPLIANCE_ROOT, MAX_LEVEL};

use crate::json::{self, JsonError};

#[derive(Debug, Error)]
pub enum LibraryError {
    #[error("schema violation: {0}")]
    Schema(#[from] JsonError),
    #[error("invalid path {path:?}: {reason}")]
    InvalidPath { path: String, reason: String },
    #[error("duplicate clause id {0}")]
    DuplicateClauseId(String),
    #[error("clause {clause}: unknown category {category}")]
    UnknownCategory { clause: String, category: String },
    #[error("clause {clause}: kind {kind} requires category {expected}")]
    KindCategoryMismatch {
        clause: String,
        kind: ClauseKind,
        expected: String,
    },
    #[error("clause {clause}: {source}")]
    Placeholder {
        clause: String,
        #[source]
        source: PlaceholderError,
    },
    #[error("clause {0}: empty text")]
    EmptyText(String),
    #[error("taxonomy has {actual} leaf categories, expected {expected}")]
    CategoryCount { expected: usize, actual: usize },
    #[error("unknown category {0}")]
    UnknownPath(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClauseKind {
    Standard,
    NonCompliant,
    Warning,
}

impl std::fmt::Display for ClauseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ClauseKind::Standard => "standard",
            ClauseKind::NonCompliant => "non_compliant",
            ClauseKind::Warning => "warning",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrivacyClause {
    pub id: String,
    pub category: MetadataPath,
    pub kind: ClauseKind,
    pub text: String,
    pub source: String,
}

impl PrivacyClause {
    /// Placeholder names; validated at load so this cannot fail for library clauses.
    pub fn placeholders(&self) -> BTreeSet<String> {
        extract_placeholders(&self.text).unwrap_or_default()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LibraryDoc {
    version: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    expected_categories: Option<usize>,
    taxonomy: Vec<Vec<String>>,
    #[serde(default)]
    clauses: Vec<PrivacyClause>,
}

/// Validated, immutable clause library.
#[derive(Debug, Clone)]
pub struct ClauseLibrary {
    version: String,
    expected_categories: Option<usize>,
    taxonomy: Taxonomy,
    clauses: Vec<PrivacyClause>,
    index: HashMap<String, usize>,
}

impl PartialEq for ClauseLibrary {
    fn eq(&self, other: &Self) -> bool {
        self.version == other.version
            && self.expected_categories == other.expected_categories
            && self.taxonomy == other.taxonomy
            && self.clauses == other.clauses
    }
}

impl ClauseLibrary {
    pub fn new(
        version: impl Into<String>,
        taxonomy: Taxonomy,
        clauses: Vec<PrivacyClause>,
        expected_categories: Option<usize>,
    ) -> Result<Self, LibraryError> {
        if let Some(expected) = expected_categories {
            let actual = taxonomy.leaf_count();
            if actual != expected {
                return Err(LibraryError::CategoryCount { expected, actual });
            }
        }
        let mut index = HashMap::with_capacity(clauses.len());
        for (i, clause) in clauses.iter().enumerate() {
            if index.insert(clause.id.clone(), i).is_some() {
                return Err(LibraryError::DuplicateClauseId(clause.id.clone()));
            }
            validate_clause(&taxonomy, clause)?;
        }
        Ok(Self {
            version: version.into(),
            expected_categories,
            taxonomy,
            clauses,
            index,
        })
    }

    pub fn version(&self) -> &str {
        &self.version
    }

    pub fn taxonomy(&self) -> &Taxonomy {
        &self.taxonomy
    }

    pub fn clauses(&self) -> &[PrivacyClause] {
        &self.clauses
    }

    pub fn get(&self, id: &str) -> Option<&PrivacyClause> {
        self.index.get(id).map(|&i| &self.clauses[i])
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Clauses filed under exactly `path`, in library order.
    pub fn clauses_for_category(&self, path: &MetadataPath) -> Result<Vec<&PrivacyClause>, LibraryError> {
        if !self.taxonomy.contains(path) && !path.is_compliance() {
            return Err(LibraryError::UnknownPath(path.to_string()));
        }
        Ok(self.clauses.iter().filter(|c| &c.category == path).collect())
    }

    pub fn to_json(&self) -> String {
        let doc = LibraryDoc {
            version: self.version.clone(),
            expected_categories: self.expected_categories,
            taxonomy: self.taxonomy.leaf_segments(),
            clauses: self.clauses.clone(),
        };
        serde_json::to_string_pretty(&doc).expect("library serializes")
    }
}

fn validate_clause(taxonomy: &Taxonomy, clause: &PrivacyClause) -> Result<(), LibraryError> {
    if clause.text.trim().is_empty() {
        return Err(LibraryError::EmptyText(clause.id.clone()));
    }
    match clause.kind {
        ClauseKind::Standard => {
            if !taxonomy.contains(&clause.category) {
                return Err(LibraryError::UnknownCategory {
                    clause: clause.id.clone(),
                    category: clause.category.to_string(),
                });
            }
        }
        ClauseKind::NonCompliant | ClauseKind::Warning => {
            if !clause.category.is_compliance() {
                return Err(LibraryError::KindCategoryMismatch {
                    clause: clause.id.clone(),
                    kind: clause.kind,
                    expected: COMPLIANCE_ROOT.into(),
                });
            }
        }
    }
    placeholder::tokens(&clause.text).map_err(|source| LibraryError::Placeholder {
        clause: clause.id.clone(),
        source,
    })?;
    Ok(())
}

/// Parses and validates a library document.
pub fn load_library(source: &[u8]) -> Result<ClauseLibrary, LibraryError> {
    let doc: LibraryDoc = json::from_slice(source)?;
    let paths = doc
        .taxonomy
        .into_iter()
        .map(MetadataPath::new)
        .collect::<Result<Vec<_>, _>>()?;
    let taxonomy = Taxonomy::from_paths(paths)?;
    ClauseLibrary::new(doc.version, taxonomy, doc.clauses, doc.expected_categories)
}
