use std::collections::{BTreeSet, HashMap};

use super::{ClauseKind, ClauseLibrary, MetadataPath};
use crate::engine::QuestionBank;
use crate::lint::LintIssue;

/// A set of categories of which at least one must be reachable, either by a
/// clause filed under it or by a clause text carrying one of the placeholders.
#[derive(Debug, Clone, Copy)]
pub struct ClauseCoverageGroup {
    pub code: &'static str,
    pub label: &'static str,
    pub paths: &'static [&'static str],
    pub placeholders: &'static [&'static str],
}

/// Controller identity and contact must each be expressible in a generated policy.
pub const CONTROLLER_COVERAGE_GROUPS: &[ClauseCoverageGroup] = &[
    ClauseCoverageGroup {
        code: "controller-contact-coverage",
        label: "CONTROLLER.CONTACT",
        paths: &[
            "CONTROLLER.CONTACT.LEGAL ADDRESS",
            "CONTROLLER.CONTACT.PHONE NUMBER",
            "CONTROLLER.CONTACT.E-MAIL",
        ],
        placeholders: &[
            "CONTROLLER'S LEGAL ADDRESS",
            "CONTROLLER'S PHONE NUMBER",
            "CONTROLLER'S EMAIL",
            "CONTROLLER.CONTACT.LEGAL ADDRESS",
            "CONTROLLER.CONTACT.PHONE NUMBER",
            "CONTROLLER.CONTACT.E-MAIL",
        ],
    },
    ClauseCoverageGroup {
        code: "controller-identity-coverage",
        label: "CONTROLLER.IDENTITY",
        paths: &["CONTROLLER.IDENTITY.LEGAL NAME", "CONTROLLER.IDENTITY.REGISTER NUMBER"],
        placeholders: &[
            "CONTROLLER'S LEGAL NAME",
            "CONTROLLER'S REGISTER NUMBER",
            "CONTROLLER.IDENTITY.LEGAL NAME",
            "CONTROLLER.IDENTITY.REGISTER NUMBER",
        ],
    },
];

/// Library hygiene checks. Never fails; returns findings in a stable order.
///
/// * exact duplicate texts within one category
/// * clause placeholders that no question in `bank` captures (only when a bank is given)
/// * controller contact/identity groups with neither a clause nor a placeholder route
pub fn lint_library(lib: &ClauseLibrary, bank: Option<&QuestionBank>) -> Vec<LintIssue> {
    let mut issues = Vec::new();

    let mut seen: HashMap<(&MetadataPath, &str), &str> = HashMap::new();
    for clause in lib.clauses() {
        let key = (&clause.category, clause.text.trim());
        if let Some(first) = seen.get(&key) {
            issues.push(LintIssue::warning(
                "duplicate-text",
                clause.id.clone(),
                format!(
                    "text duplicates clause {first} in category {}; keep only one",
                    clause.category
                ),
            ));
        } else {
            seen.insert(key, &clause.id);
        }
    }

    if let Some(bank) = bank {
        let captured: BTreeSet<&str> = bank.questions().filter_map(|q| q.placeholder.as_deref()).collect();
        for clause in lib.clauses() {
            for name in clause.placeholders() {
                if !captured.contains(name.as_str()) {
                    issues.push(LintIssue::warning(
                        "unbound-placeholder",
                        clause.id.clone(),
                        format!("placeholder [{name}] is not captured by any question"),
                    ));
                }
            }
        }
    }

    for group in CONTROLLER_COVERAGE_GROUPS {
        let by_category = lib
            .clauses()
            .iter()
            .any(|c| c.kind == ClauseKind::Standard && group.paths.iter().any(|p| c.category.to_string() == *p));
        let by_placeholder = lib.clauses().iter().any(|c| {
            c.placeholders()
                .iter()
                .any(|n| group.placeholders.contains(&n.as_str()))
        });
        if !by_category && !by_placeholder {
            issues.push(LintIssue::warning(
                group.code,
                group.label,
                format!(
                    "no clause and no placeholder route for {}.*; at least one must be present for a complete policy",
                    group.label
                ),
            ));
        }
    }

    issues
}
