//! Placeholder tokens: `[NAME]` where NAME is one or more of `A-Z 0-9 ' - .` and space.

use std::collections::BTreeSet;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed placeholder at byte {offset}: {reason}")]
pub struct PlaceholderError {
    pub offset: usize,
    pub reason: String,
}

pub fn is_placeholder_char(c: char) -> bool {
    c.is_ascii_uppercase() || c.is_ascii_digit() || matches!(c, ' ' | '\'' | '-' | '.')
}

pub fn is_placeholder_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(is_placeholder_char)
}

/// A placeholder occurrence in a text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token<'a> {
    pub name: &'a str,
    /// Byte range of the whole `[NAME]` token.
    pub start: usize,
    pub end: usize,
}

/// Scans `text` for bracketed tokens. Every bracket pair must hold a valid name.
pub fn tokens(text: &str) -> Result<Vec<Token<'_>>, PlaceholderError> {
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for (i, c) in text.char_indices() {
        match c {
            '[' => {
                if let Some(prev) = open {
                    return Err(PlaceholderError {
                        offset: prev,
                        reason: "unclosed '[' before nested '['".into(),
                    });
                }
                open = Some(i);
            }
            ']' => {
                let Some(start) = open.take() else {
                    return Err(PlaceholderError {
                        offset: i,
                        reason: "']' without matching '['".into(),
                    });
                };
                let name = &text[start + 1..i];
                if !is_placeholder_name(name) {
                    return Err(PlaceholderError {
                        offset: start,
                        reason: format!("invalid placeholder name {name:?}"),
                    });
                }
                out.push(Token {
                    name,
                    start,
                    end: i + 1,
                });
            }
            _ => {}
        }
    }
    if let Some(start) = open {
        return Err(PlaceholderError {
            offset: start,
            reason: "unclosed '['".into(),
        });
    }
    Ok(out)
}

/// Distinct placeholder names in `text`.
pub fn extract_placeholders(text: &str) -> Result<BTreeSet<String>, PlaceholderError> {
    Ok(tokens(text)?.into_iter().map(|t| t.name.to_string()).collect())
}

/// Lenient scan used on rendered output: does any substring match the token grammar?
pub fn contains_placeholder_like(text: &str) -> bool {
    let bytes = text.as_bytes();
    let mut i = 0;
    while let Some(off) = text[i..].find('[') {
        let start = i + off;
        let rest = &text[start + 1..];
        let len = rest
            .chars()
            .take_while(|&c| is_placeholder_char(c))
            .map(char::len_utf8)
            .sum::<usize>();
        if len > 0 && bytes.get(start + 1 + len) == Some(&b']') {
            return true;
        }
        i = start + 1;
    }
    false
}
