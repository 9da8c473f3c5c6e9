//! Template slot notation: `[Q#-TYPE(.PA)?→([PLACEHOLDER]→)?(CLAUSES→)?NEXT]`.
//!
//! `->` is accepted for `→`. Clause lists may be written `C2,C3`, `C2, C3` or
//! `C2 AND C3`; the canonical form is `C2,C3`. BOOL slots carry `.YES` or
//! `.NO`; INFO and MTPC slots take any answer and omit the suffix (`.ANY` is
//! accepted on input).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::engine::{is_qnum, FlowTarget, QType, Selector};
use crate::library::placeholder::{self, PlaceholderError};

pub const ARROW: char = '→';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SlotError {
    #[error("slot must be enclosed in [ ]: {0:?}")]
    NotBracketed(String),
    #[error("missing arrow segment in {0:?}")]
    MissingArrow(String),
    #[error("too many arrow segments in {0:?}")]
    TooManySegments(String),
    #[error("slot head {0:?} is not Q#-TYPE")]
    BadHead(String),
    #[error("invalid question number {0:?}")]
    BadQnum(String),
    #[error("unknown question type {0}")]
    UnknownQType(String),
    #[error("unknown answer selector {0}")]
    UnknownSelector(String),
    #[error("{qtype} slot cannot use selector {selector}")]
    SelectorForType { qtype: QType, selector: Selector },
    #[error("BOOL slot cannot carry a placeholder")]
    PlaceholderOnBool,
    #[error(transparent)]
    Placeholder(#[from] PlaceholderError),
    #[error("invalid clause list {0:?}")]
    BadClauses(String),
    #[error("invalid next question {0:?}")]
    BadNext(String),
}

/// One question's position and outputs in the policy template.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TemplateSlot {
    pub qnum: String,
    pub qtype: QType,
    pub selector: Selector,
    pub placeholder: Option<String>,
    pub clauses: Vec<String>,
    pub next: FlowTarget,
}

fn is_clause_id(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_uppercase()) && chars.all(|c| c.is_ascii_alphanumeric())
}

fn parse_clauses(seg: &str) -> Result<Vec<String>, SlotError> {
    let ids: Vec<String> = seg
        .replace(" AND ", ",")
        .split(',')
        .map(|s| s.trim().to_string())
        .collect();
    if ids.iter().any(|id| !is_clause_id(id)) {
        return Err(SlotError::BadClauses(seg.to_string()));
    }
    Ok(ids)
}

fn parse_placeholder(seg: &str) -> Result<String, SlotError> {
    let toks = placeholder::tokens(seg)?;
    match toks.as_slice() {
        [t] if t.start == 0 && t.end == seg.len() && !t.name.trim().is_empty() => Ok(t.name.trim().to_string()),
        _ => Err(PlaceholderError {
            offset: 0,
            reason: format!("expected a single [NAME] segment, got {seg:?}"),
        }
        .into()),
    }
}

/// Parses one slot notation string.
pub fn parse_slot(notation: &str) -> Result<TemplateSlot, SlotError> {
    let s = notation.trim();
    let inner = s
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| SlotError::NotBracketed(notation.to_string()))?;
    let inner = inner.replace("->", "→");
    let segs: Vec<&str> = inner.split(ARROW).map(str::trim).collect();
    if segs.len() < 2 {
        return Err(SlotError::MissingArrow(notation.to_string()));
    }
    if segs.len() > 4 {
        return Err(SlotError::TooManySegments(notation.to_string()));
    }

    let head = segs[0];
    let (qnum, ty) = head
        .split_once('-')
        .ok_or_else(|| SlotError::BadHead(head.to_string()))?;
    if !is_qnum(qnum) {
        return Err(SlotError::BadQnum(qnum.to_string()));
    }
    let (ty, pa) = match ty.split_once('.') {
        Some((t, p)) => (t, Some(p)),
        None => (ty, None),
    };
    let qtype: QType = ty.parse().map_err(SlotError::UnknownQType)?;
    let selector = match pa {
        None => Selector::Any,
        Some("YES") => Selector::Yes,
        Some("NO") => Selector::No,
        Some("ANY") => Selector::Any,
        Some(other) => return Err(SlotError::UnknownSelector(other.to_string())),
    };
    let selector_ok = match qtype {
        QType::Bool => selector != Selector::Any,
        QType::Info | QType::Mtpc => selector == Selector::Any,
    };
    if !selector_ok {
        return Err(SlotError::SelectorForType { qtype, selector });
    }

    let last = segs[segs.len() - 1];
    let next: FlowTarget = last.parse().map_err(|_| SlotError::BadNext(last.to_string()))?;

    let mut placeholder = None;
    let mut clauses = Vec::new();
    let middle = &segs[1..segs.len() - 1];
    for (i, seg) in middle.iter().enumerate() {
        if seg.starts_with('[') {
            if i != 0 {
                return Err(SlotError::TooManySegments(notation.to_string()));
            }
            if qtype == QType::Bool {
                return Err(SlotError::PlaceholderOnBool);
            }
            placeholder = Some(parse_placeholder(seg)?);
        } else {
            if !clauses.is_empty() {
                return Err(SlotError::TooManySegments(notation.to_string()));
            }
            clauses = parse_clauses(seg)?;
        }
    }

    Ok(TemplateSlot {
        qnum: qnum.to_string(),
        qtype,
        selector,
        placeholder,
        clauses,
        next,
    })
}

/// Canonical notation for `notation`, or the parse error.
pub fn normalize_slot(notation: &str) -> Result<String, SlotError> {
    parse_slot(notation).map(|s| s.to_string())
}

impl fmt::Display for TemplateSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}-{}", self.qnum, self.qtype)?;
        if self.qtype == QType::Bool {
            write!(f, ".{}", self.selector)?;
        }
        if let Some(p) = &self.placeholder {
            write!(f, "{ARROW}[{p}]")?;
        }
        if !self.clauses.is_empty() {
            write!(f, "{ARROW}{}", self.clauses.join(","))?;
        }
        write!(f, "{ARROW}{}]", self.next)
    }
}

impl FromStr for TemplateSlot {
    type Err = SlotError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_slot(s)
    }
}

impl Serialize for TemplateSlot {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for TemplateSlot {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn info_slot_with_placeholder() {
        let s = parse_slot("[Q3-INFO→[CONTROLLER'S LEGAL ADDRESS]→Q4]").unwrap();
        assert_eq!(s.qnum, "Q3");
        assert_eq!(s.qtype, QType::Info);
        assert_eq!(s.selector, Selector::Any);
        assert_eq!(s.placeholder.as_deref(), Some("CONTROLLER'S LEGAL ADDRESS"));
        assert!(s.clauses.is_empty());
        assert_eq!(s.next, FlowTarget::Question("Q4".into()));
    }

    #[test]
    fn bool_slot() {
        let s = parse_slot("[Q88-BOOL.NO→Q93]").unwrap();
        assert_eq!(
            (s.qtype, s.selector, s.placeholder.clone(), s.clauses.len()),
            (QType::Bool, Selector::No, None, 0)
        );
        assert_eq!(s.to_string(), "[Q88-BOOL.NO→Q93]");
    }

    #[test]
    fn slot_with_clause() {
        let s = parse_slot("[Q166-INFO→[CONTROLLER'S REGISTER NUMBER]→C4→Q3]").unwrap();
        assert_eq!(s.clauses, vec!["C4"]);
        assert_eq!(s.to_string(), "[Q166-INFO→[CONTROLLER'S REGISTER NUMBER]→C4→Q3]");
    }

    #[test]
    fn normalizes_ascii_arrows_and_lists() {
        assert_eq!(
            normalize_slot(" [Q1-INFO -> [CONTROLLER'S LEGAL NAME] -> C2 AND C3 -> Q2] ").unwrap(),
            "[Q1-INFO→[CONTROLLER'S LEGAL NAME]→C2,C3→Q2]"
        );
        assert_eq!(
            normalize_slot("[Q5-BOOL.YES→C5, C6→Q6]").unwrap(),
            "[Q5-BOOL.YES→C5,C6→Q6]"
        );
        assert_eq!(normalize_slot("[Q4-INFO.ANY→[X]→END]").unwrap(), "[Q4-INFO→[X]→END]");
    }

    #[test]
    fn errors() {
        assert_eq!(
            parse_slot("[Q3-FOO→Q4]").unwrap_err().to_string(),
            "unknown question type FOO"
        );
        assert!(matches!(parse_slot("[Q3-INFO]"), Err(SlotError::MissingArrow(_))));
        assert!(matches!(
            parse_slot("[Q3-INFO→[BAD→Q4]"),
            Err(SlotError::Placeholder(_))
        ));
        assert!(matches!(
            parse_slot("[Q88-BOOL→Q93]"),
            Err(SlotError::SelectorForType { .. })
        ));
        assert!(matches!(
            parse_slot("[Q3-INFO.YES→Q4]"),
            Err(SlotError::SelectorForType { .. })
        ));
        assert!(matches!(
            parse_slot("[Q2-BOOL.YES→[X]→Q4]"),
            Err(SlotError::PlaceholderOnBool)
        ));
        assert!(matches!(parse_slot("[Q3-INFO→Q4→]"), Err(SlotError::BadNext(_))));
        assert!(matches!(parse_slot("Q3-INFO→Q4"), Err(SlotError::NotBracketed(_))));
    }
}
