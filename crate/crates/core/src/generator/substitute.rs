use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::GenerateError;
use crate::engine::ActiveOutputs;
use crate::library::placeholder;

/// A placeholder's value. MTPC answers keep their items so they can render as a list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubstValue {
    Text(String),
    List(Vec<String>),
}

impl SubstValue {
    pub fn inline(&self) -> String {
        match self {
            SubstValue::Text(t) => t.clone(),
            SubstValue::List(items) => items.join(", "),
        }
    }

    pub fn is_empty(&self) -> bool {
        match self {
            SubstValue::Text(t) => t.trim().is_empty(),
            SubstValue::List(items) => items.is_empty() || items.iter().all(|i| i.trim().is_empty()),
        }
    }
}

pub type SubstitutionMap = BTreeMap<String, SubstValue>;

/// Builds the substitution map from a session's active outputs.
pub fn substitution_map(outputs: &ActiveOutputs) -> SubstitutionMap {
    outputs
        .placeholders
        .iter()
        .map(|(name, text)| {
            let value = match outputs.lists.get(name) {
                Some(items) => SubstValue::List(items.clone()),
                None => SubstValue::Text(text.clone()),
            };
            (name.clone(), value)
        })
        .filter(|(_, v)| !v.is_empty())
        .collect()
}

/// How list values are laid out.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListStyle {
    /// A list that ends its sentence is lifted out as bullet items.
    #[default]
    Bulleted,
    /// Items joined with ", ".
    Inline,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution {
    pub text: String,
    pub bullets: Vec<String>,
    /// Names left in place because no value was supplied.
    pub unresolved: BTreeSet<String>,
}

/// Replaces every placeholder that has a value. In strict mode a missing
/// value is an error; otherwise the token stays and is reported.
pub fn substitute(text: &str, values: &SubstitutionMap, strict: bool) -> Result<Substitution, GenerateError> {
    resolve(text, values, strict, ListStyle::Inline)
}

pub(crate) fn resolve(
    text: &str,
    values: &SubstitutionMap,
    strict: bool,
    style: ListStyle,
) -> Result<Substitution, GenerateError> {
    let tokens = placeholder::tokens(text)?;
    let missing: BTreeSet<String> = tokens
        .iter()
        .filter(|t| !values.contains_key(t.name))
        .map(|t| t.name.to_string())
        .collect();
    if strict && !missing.is_empty() {
        return Err(GenerateError::Unresolved(missing.into_iter().collect()));
    }

    let mut out = Substitution {
        unresolved: missing,
        ..Default::default()
    };
    let mut last = 0;
    for (i, tok) in tokens.iter().enumerate() {
        out.text.push_str(&text[last..tok.start]);
        last = tok.end;
        match values.get(tok.name) {
            None => out.text.push_str(&text[tok.start..tok.end]),
            Some(SubstValue::List(items))
                if style == ListStyle::Bulleted
                    && out.bullets.is_empty()
                    && i + 1 == tokens.len()
                    && text[tok.end..]
                        .trim_matches(|c: char| c.is_whitespace() || c == '.')
                        .is_empty() =>
            {
                out.bullets = items.clone();
                let trimmed = out.text.trim_end().len();
                out.text.truncate(trimmed);
                last = text.len();
            }
            Some(v) => out.text.push_str(&v.inline()),
        }
    }
    out.text.push_str(&text[last..]);
    Ok(out)
}
