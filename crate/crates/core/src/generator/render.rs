use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::document::{PolicyDocument, PolicyItem};
use super::GenerateError;
use crate::library::ClauseKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Plain,
    Markdown,
    Html,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Plain => "txt",
            Format::Markdown => "md",
            Format::Html => "html",
        }
    }

    pub fn content_type(self) -> &'static str {
        match self {
            Format::Plain => "text/plain; charset=utf-8",
            Format::Markdown => "text/markdown; charset=utf-8",
            Format::Html => "text/html; charset=utf-8",
        }
    }
}

impl FromStr for Format {
    type Err = GenerateError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "plain" | "text" | "txt" => Ok(Format::Plain),
            "markdown" | "md" => Ok(Format::Markdown),
            "html" => Ok(Format::Html),
            _ => Err(GenerateError::UnknownFormat(s.to_string())),
        }
    }
}

pub const NON_COMPLIANT_MARK: &str = "NON-COMPLIANT:";
pub const REVIEW_MARK: &str = "REVIEW:";

fn marker(kind: ClauseKind) -> Option<&'static str> {
    match kind {
        ClauseKind::Standard => None,
        ClauseKind::NonCompliant => Some(NON_COMPLIANT_MARK),
        ClauseKind::Warning => Some(REVIEW_MARK),
    }
}

/// Renders the document. Output is a pure function of the document.
pub fn render(doc: &PolicyDocument, format: Format) -> Vec<u8> {
    let s = match format {
        Format::Plain => render_plain(doc),
        Format::Markdown => render_markdown(doc),
        Format::Html => render_html(doc),
    };
    s.into_bytes()
}

fn render_plain(doc: &PolicyDocument) -> String {
    let mut out = String::new();
    out.push_str(&doc.title);
    out.push_str("\n\n");
    if let Some(ts) = &doc.metadata.generated_at {
        let _ = writeln!(out, "Generated: {ts}\n");
    }
    let blocks: Vec<String> = doc
        .sections
        .iter()
        .map(|section| {
            let mut block = format!("{}. {}\n", section.index, section.heading);
            for item in &section.items {
                block.push('\n');
                plain_item(&mut block, item, "");
            }
            block
        })
        .collect();
    out.push_str(&blocks.join("\n"));
    out
}

fn plain_item(out: &mut String, item: &PolicyItem, bullet: &str) {
    if let Some(m) = marker(item.kind) {
        out.push_str(m);
        out.push(' ');
    }
    out.push_str(&item.text);
    out.push('\n');
    for b in &item.bullets {
        let _ = writeln!(out, "{bullet}  - {b}");
    }
}

fn render_markdown(doc: &PolicyDocument) -> String {
    let mut out = format!("# {}\n", doc.title);
    if let Some(ts) = &doc.metadata.generated_at {
        let _ = write!(out, "\n_Generated: {ts}_\n");
    }
    for section in &doc.sections {
        let _ = write!(out, "\n## {}. {}\n", section.index, section.heading);
        for item in &section.items {
            out.push('\n');
            if let Some(m) = marker(item.kind) {
                let _ = write!(out, "**{m}** ");
            }
            out.push_str(&item.text);
            out.push('\n');
            if !item.bullets.is_empty() {
                out.push('\n');
                for b in &item.bullets {
                    let _ = writeln!(out, "- {b}");
                }
            }
        }
    }
    out
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}

fn render_html(doc: &PolicyDocument) -> String {
    let title = escape(&doc.title);
    let mut out = format!(
        "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>{title}</title>\n</head>\n<body>\n<h1>{title}</h1>\n"
    );
    if let Some(ts) = &doc.metadata.generated_at {
        let _ = writeln!(out, "<p class=\"generated\">Generated: {}</p>", escape(ts));
    }
    for section in &doc.sections {
        let _ = writeln!(
            out,
            "<section>\n<h2>{}. {}</h2>",
            section.index,
            escape(&section.heading)
        );
        for item in &section.items {
            let class = match item.kind {
                ClauseKind::Standard => "",
                ClauseKind::NonCompliant => " class=\"non-compliant\"",
                ClauseKind::Warning => " class=\"warning\"",
            };
            out.push_str(&format!("<p{class}>"));
            if let Some(m) = marker(item.kind) {
                let _ = write!(out, "<strong>{m}</strong> ");
            }
            out.push_str(&escape(&item.text));
            out.push_str("</p>\n");
            if !item.bullets.is_empty() {
                out.push_str("<ul>\n");
                for b in &item.bullets {
                    let _ = writeln!(out, "<li>{}</li>", escape(b));
                }
                out.push_str("</ul>\n");
            }
        }
        out.push_str("</section>\n");
    }
    out.push_str("</body>\n</html>\n");
    out
}
