use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use policygen_core::engine::{AnswersFile, Cursor, Session};
use policygen_core::generator::PolicyDocument;
use policygen_core::library::ClauseKind;
use policygen_service::Catalog;

use crate::{render_policy, write_output, OutputArgs, EXIT_FLAGGED, EXIT_OK};

/// Replays `answers` and writes the policy. Returns 2 when the policy carries
/// non-compliant items.
pub fn run_batch(
    catalog: &Catalog,
    answers: &[u8],
    output: &OutputArgs,
    strict: bool,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8> {
    let file = AnswersFile::parse(answers).context("invalid answers file")?;
    let session = file.replay(&catalog.bank)?;
    if let Cursor::At(next) = session.cursor() {
        if strict {
            bail!("answers stop before the interview is completed; {next} is unanswered");
        }
        writeln!(stderr, "warning: answers stop at {next}; writing a draft")?;
    }
    finish(catalog, &session, strict, output, stdout, stderr)
}

pub(crate) fn finish(
    catalog: &Catalog,
    session: &Session,
    strict: bool,
    output: &OutputArgs,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> Result<u8> {
    let (doc, bytes) = render_policy(catalog, session, strict, output)?;
    write_output(&output.out, &bytes, stdout)?;
    report(&doc, &output.out, stderr)?;
    Ok(if doc.has_non_compliant() { EXIT_FLAGGED } else { EXIT_OK })
}

fn report(doc: &PolicyDocument, out: &Path, stderr: &mut dyn Write) -> Result<()> {
    let clauses = doc.items().filter(|i| !i.is_static()).count();
    if out != Path::new("-") {
        writeln!(stderr, "wrote {} ({clauses} clauses)", out.display())?;
    }
    for item in doc.items().filter(|i| i.kind != ClauseKind::Standard) {
        let label = match item.kind {
            ClauseKind::NonCompliant => "non-compliant",
            _ => "review",
        };
        writeln!(stderr, "{label}: {} ({})", item.text, item.origin)?;
    }
    Ok(())
}
