//! Line-oriented interview. Besides answers, a prompt accepts:
//!
//! * `:back` re-asks the previous question on the trail
//! * `:amend Q2` re-asks any answered question
//! * `:preview` prints the draft policy
//! * `:quit` saves the transcript and stops (resume with `--resume`)
//! * `:help`

use std::io::{BufRead, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use policygen_core::engine::{AnswerValue, AnswersFile, Cursor, QType, Question, Session};
use policygen_core::generator::{generate, render, Format, GenerateOptions};
use policygen_service::Catalog;

use crate::batch::finish;
use crate::{OutputArgs, EXIT_OK};

#[derive(Debug, Clone)]
pub struct WizardOptions {
    pub output: OutputArgs,
    pub transcript: PathBuf,
    pub resume: bool,
    /// Whether input comes from a terminal; only changes the end-of-input message.
    pub interactive: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WizardOutcome {
    Written { exit: u8 },
    Saved,
}

impl WizardOutcome {
    pub fn exit_code(self) -> u8 {
        match self {
            WizardOutcome::Written { exit } => exit,
            WizardOutcome::Saved => EXIT_OK,
        }
    }
}

const HELP: &str = "answer the question, or :back, :amend QNUM, :preview, :quit, :help";

enum Step {
    Answer(String),
    Back,
    Amend(String),
    Preview,
    Quit,
    Help,
    Submit,
}

fn read_step(input: &mut dyn BufRead) -> Result<Option<Step>> {
    let mut line = String::new();
    if input.read_line(&mut line)? == 0 {
        return Ok(None);
    }
    let line = line.trim();
    let step = match line
        .split_once(char::is_whitespace)
        .map_or((line, ""), |(a, b)| (a, b.trim()))
    {
        (":back", _) => Step::Back,
        (":amend", q) => Step::Amend(q.to_uppercase()),
        (":preview", _) => Step::Preview,
        (":quit" | ":q", _) => Step::Quit,
        (":help" | ":h" | "?", _) => Step::Help,
        (":submit", _) => Step::Submit,
        _ => Step::Answer(line.to_string()),
    };
    Ok(Some(step))
}

/// Turns a typed line into an answer, or a hint explaining the expected shape.
fn parse_answer(q: &Question, line: &str) -> Result<AnswerValue, String> {
    match q.qtype {
        QType::Bool => match line.to_ascii_lowercase().as_str() {
            "y" | "yes" => Ok(AnswerValue::yes()),
            "n" | "no" => Ok(AnswerValue::no()),
            _ => Err("please answer yes or no".into()),
        },
        QType::Info => {
            if line.is_empty() {
                Err("please enter a value".into())
            } else {
                Ok(AnswerValue::text(line))
            }
        }
        QType::Mtpc => {
            let mut picked = Vec::new();
            for part in line.split([',', ' ']).filter(|s| !s.is_empty()) {
                match part.parse::<usize>() {
                    Ok(n) if (1..=q.options.len()).contains(&n) => picked.push(q.options[n - 1].clone()),
                    _ => {
                        return Err(format!(
                            "enter option numbers between 1 and {}, e.g. 1,3",
                            q.options.len()
                        ))
                    }
                }
            }
            if picked.is_empty() {
                return Err("select at least one option".into());
            }
            Ok(AnswerValue::Choices(picked))
        }
    }
}

fn show_question(
    out: &mut dyn Write,
    catalog: &Catalog,
    session: &Session,
    q: &Question,
    amending: bool,
) -> Result<()> {
    let section = catalog.bank.sections().get(&q.section).map_or("", |s| s.name.as_str());
    let kind = match q.qtype {
        QType::Bool => "yes/no",
        QType::Info => "text",
        QType::Mtpc => "choose one or more",
    };
    writeln!(out)?;
    writeln!(
        out,
        "[{} {section}] {} ({kind}){}",
        q.section,
        q.qnum,
        if amending { ", amending" } else { "" }
    )?;
    writeln!(out, "{}", q.text)?;
    for (i, o) in q.options.iter().enumerate() {
        writeln!(out, "  {}. {o}", i + 1)?;
    }
    if let Some(prev) = session.answer(&q.qnum) {
        let shown = match &prev.value {
            AnswerValue::Bool(b) => b.as_str().to_string(),
            AnswerValue::Text(t) => t.clone(),
            AnswerValue::Choices(c) => c.join(", "),
        };
        writeln!(out, "(current answer: {shown})")?;
    }
    write!(out, "> ")?;
    out.flush()?;
    Ok(())
}

fn save_transcript(session: &Session, path: &PathBuf) -> Result<()> {
    std::fs::write(path, AnswersFile::from_session(session).to_json())
        .with_context(|| format!("cannot write transcript {}", path.display()))
}

/// Interviews the policymaker over `input`/`out`, keeping the transcript on disk
/// after every accepted answer.
pub fn run_wizard(
    catalog: &Catalog,
    opts: &WizardOptions,
    input: &mut dyn BufRead,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<WizardOutcome> {
    let bank = &catalog.bank;
    let mut session = if opts.resume {
        let bytes = std::fs::read(&opts.transcript)
            .with_context(|| format!("cannot resume from {}", opts.transcript.display()))?;
        let s = AnswersFile::parse(&bytes).context("invalid transcript")?.replay(bank)?;
        writeln!(out, "resuming with {} answers", s.active_answers().count())?;
        s
    } else {
        Session::start(bank)
    };
    writeln!(out, "{HELP}")?;

    // question being amended instead of the cursor
    let mut amending: Option<String> = None;
    loop {
        let target = match (&amending, session.cursor()) {
            (Some(q), _) => Some(q.clone()),
            (None, Cursor::At(q)) => Some(q.clone()),
            (None, Cursor::Completed) => None,
        };
        match &target {
            Some(q) => show_question(out, catalog, &session, bank.question(q)?, amending.is_some())?,
            None => {
                writeln!(out)?;
                write!(
                    out,
                    "All questions answered. Press Enter to write the policy, or :back / :amend QNUM.\n> "
                )?;
                out.flush()?;
            }
        }

        let Some(step) = read_step(input)? else {
            if target.is_none() {
                writeln!(out)?;
                break;
            }
            save_transcript(&session, &opts.transcript)?;
            if session.answers().is_empty() && !opts.interactive {
                bail!("no answers on input; for non-interactive use run `policygen batch --answers FILE`");
            }
            writeln!(out)?;
            writeln!(err, "input ended; transcript saved to {}", opts.transcript.display())?;
            return Ok(WizardOutcome::Saved);
        };

        match step {
            Step::Help => writeln!(out, "{HELP}")?,
            Step::Quit => {
                save_transcript(&session, &opts.transcript)?;
                writeln!(out, "saved to {}; continue with --resume", opts.transcript.display())?;
                return Ok(WizardOutcome::Saved);
            }
            Step::Preview => {
                let doc = generate(
                    &catalog.template,
                    &session,
                    &catalog.library,
                    &GenerateOptions::preview(),
                )?;
                out.write_all(&render(&doc, Format::Plain))?;
            }
            Step::Back => {
                let current = target.as_deref();
                let idx = match current.and_then(|q| session.trail().iter().position(|t| t == q)) {
                    Some(i) => i.checked_sub(1),
                    None => session.trail().len().checked_sub(1),
                };
                match idx.map(|i| session.trail()[i].clone()) {
                    Some(q) if session.answer(&q).is_some() => amending = Some(q),
                    _ => writeln!(out, "already at the first question")?,
                }
            }
            Step::Amend(q) => {
                if session.is_active(&q) {
                    amending = Some(q);
                } else {
                    writeln!(out, "{q} is not an answered question on the current path")?;
                }
            }
            Step::Submit | Step::Answer(_) if target.is_none() => break,
            Step::Submit => writeln!(out, "the interview is not finished yet")?,
            Step::Answer(line) => {
                let qnum = target.expect("checked above");
                let question = bank.question(&qnum)?;
                let value = match parse_answer(question, &line) {
                    Ok(v) => v,
                    Err(hint) => {
                        writeln!(out, "{hint}")?;
                        continue;
                    }
                };
                let result = if amending.is_some() {
                    session.amend_answer(bank, &qnum, value).map(|_| ())
                } else {
                    session.submit_answer(bank, value).map(|_| ())
                };
                match result {
                    Ok(()) => {
                        amending = None;
                        save_transcript(&session, &opts.transcript)?;
                    }
                    Err(e) => writeln!(out, "{e}")?,
                }
            }
        }
    }

    save_transcript(&session, &opts.transcript)?;
    let exit = finish(catalog, &session, true, &opts.output, out, err)?;
    writeln!(out, "transcript saved to {}", opts.transcript.display())?;
    Ok(WizardOutcome::Written { exit })
}
