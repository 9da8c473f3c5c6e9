use std::collections::BTreeSet;
use std::io::{BufRead, Write};
use std::path::PathBuf;

use anyhow::{Context, Result};
use policygen_core::engine::{lint_bank as lint_bank_doc, AnswersFile, BankDocument};
use policygen_core::evaluation::{
    evaluate_completeness, evaluate_coverage, fre_score_with, presence_from_session, CoverageRating, MetadataPresence,
    Rating,
};
use policygen_core::generator::PolicyTemplate;
use policygen_core::library::{lint_library as lint_library_doc, load_library};
use policygen_core::lint::{LintIssue, Severity};
use policygen_core::shipped;
use policygen_service::Catalog;

use crate::{load_catalog, read_input, EvalCommand, InputArgs, PresenceSource, EXIT_FAILURE, EXIT_FLAGGED, EXIT_OK};

fn print_issues(issues: &[LintIssue], json: bool, out: &mut dyn Write) -> Result<()> {
    if json {
        writeln!(out, "{}", serde_json::to_string_pretty(issues)?)?;
        return Ok(());
    }
    for i in issues {
        let sev = match i.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Note => "note",
        };
        writeln!(out, "{sev}[{}] {}: {}", i.code, i.subject, i.message)?;
    }
    let errors = issues.iter().filter(|i| i.severity == Severity::Error).count();
    let warnings = issues.iter().filter(|i| i.severity == Severity::Warning).count();
    writeln!(out, "{errors} errors, {warnings} warnings")?;
    Ok(())
}

fn read_or_bundled(path: &Option<PathBuf>, bundled: &'static str) -> Result<Vec<u8>> {
    match path {
        Some(p) => std::fs::read(p).with_context(|| format!("cannot read {}", p.display())),
        None => Ok(bundled.as_bytes().to_vec()),
    }
}

/// Lints the raw bank document so every problem is listed, not just the first.
pub fn lint_bank(inputs: &InputArgs, json: bool, out: &mut dyn Write) -> Result<u8> {
    let doc = BankDocument::parse(&read_or_bundled(&inputs.bank, shipped::BANK_JSON)?).context("bank")?;
    let mut issues = lint_bank_doc(&doc);
    if !issues.iter().any(|i| i.severity == Severity::Error) {
        let bank = policygen_core::engine::QuestionBank::from_document(doc)?;
        let bytes = read_or_bundled(&inputs.template, shipped::TEMPLATE_JSON)?;
        match PolicyTemplate::load(&bytes, &bank) {
            Ok(t) => issues.extend(t.lint(&bank)),
            Err(e) => issues.push(LintIssue::error("template", "template", e.to_string())),
        }
    }
    print_issues(&issues, json, out)?;
    Ok(if issues.iter().any(|i| i.severity == Severity::Error) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    })
}

pub fn lint_library(inputs: &InputArgs, json: bool, deny_warnings: bool, out: &mut dyn Write) -> Result<u8> {
    let lib = load_library(&read_or_bundled(&inputs.library, shipped::LIBRARY_JSON)?).context("library")?;
    let bank = match &inputs.bank {
        Some(_) => Some(load_catalog(inputs, None, None)?.bank),
        None => Some(shipped::bank()),
    };
    let issues = lint_library_doc(&lib, bank.as_ref());
    print_issues(&issues, json, out)?;
    let failing = issues
        .iter()
        .any(|i| i.severity == Severity::Error || (deny_warnings && i.severity == Severity::Warning));
    Ok(if failing { EXIT_FAILURE } else { EXIT_OK })
}

fn presence(catalog: &Catalog, source: &PresenceSource, stdin: &mut dyn BufRead) -> Result<MetadataPresence> {
    if let Some(p) = &source.presence {
        let p = MetadataPresence::parse(&read_input(p, stdin)?).context("presence file")?;
        p.validate(&catalog.vocabulary)?;
        return Ok(p);
    }
    let path = source.answers.as_ref().expect("clap requires one source");
    let file = AnswersFile::parse(&read_input(path, stdin)?).context("invalid answers file")?;
    let session = file.replay(&catalog.bank)?;
    Ok(presence_from_session(&session, &catalog.bank, &catalog.library))
}

pub fn run(inputs: &InputArgs, cmd: EvalCommand, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Result<u8> {
    match cmd {
        EvalCommand::Readability {
            file,
            words_per_minute,
            json,
        } => {
            anyhow::ensure!(
                words_per_minute.is_finite() && words_per_minute > 0.0,
                "--words-per-minute must be positive"
            );
            let bytes = read_input(&file, stdin)?;
            let text = String::from_utf8(bytes).context("text is not UTF-8")?;
            let r = fre_score_with(&text, words_per_minute)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&r)?)?;
            } else {
                writeln!(out, "words          {}", r.words)?;
                writeln!(out, "sentences      {}", r.sentences)?;
                writeln!(out, "syllables      {}", r.syllables)?;
                writeln!(out, "ASL            {:.2}", r.asl)?;
                writeln!(out, "ASW            {:.3}", r.asw)?;
                writeln!(out, "FRE            {:.1}", r.fre)?;
                writeln!(out, "reading time   {} at {} wpm", r.reading_time(), r.words_per_minute)?;
            }
            Ok(EXIT_OK)
        }
        EvalCommand::Completeness { source, criteria, json } => {
            let catalog = load_catalog(inputs, criteria, None)?;
            let p = presence(&catalog, &source, stdin)?;
            let report = evaluate_completeness(&catalog.criteria, &p, &catalog.vocabulary)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                for r in &report.ratings {
                    let strength = format!("{:?}", r.strength).to_lowercase();
                    let rating = match r.rating {
                        Rating::Satisfied => "satisfied",
                        Rating::Unsatisfied => "unsatisfied",
                        Rating::PreconditionNotSatisfied => "precondition not satisfied",
                    };
                    writeln!(out, "{:<6} {strength:<7} {rating}", r.id)?;
                }
                let t = report.tally;
                writeln!(
                    out,
                    "complete: {} ({} satisfied, {} unsatisfied, {} precondition not satisfied)",
                    if report.complete { "yes" } else { "no" },
                    t.satisfied,
                    t.unsatisfied,
                    t.precondition_not_satisfied
                )?;
            }
            Ok(if report.complete { EXIT_OK } else { EXIT_FLAGGED })
        }
        EvalCommand::Coverage {
            source,
            checklist,
            review_flags,
            json,
        } => {
            let catalog = load_catalog(inputs, None, checklist)?;
            let p = presence(&catalog, &source, stdin)?;
            let flags: BTreeSet<String> = review_flags.into_iter().collect();
            let report = evaluate_coverage(&catalog.checklist, &p, &flags);
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                for (r, t) in report.ratings.iter().zip(&catalog.checklist) {
                    let mark = match r.rating {
                        CoverageRating::Y => "Y",
                        CoverageRating::N => "N",
                        CoverageRating::W => "W",
                    };
                    writeln!(out, "{mark}  {:<6} {}", r.id, t.description)?;
                }
                writeln!(out, "covered: {} of {}", report.covered_count, report.ratings.len())?;
            }
            Ok(EXIT_OK)
        }
    }
}
