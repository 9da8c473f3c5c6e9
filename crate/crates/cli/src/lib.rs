//! `policygen` command line: wizard, batch generation, lint, evaluation and serve.
//!
//! Exit codes: 0 success, 1 failure, 2 policy generated but flagged
//! (non-compliant items, or an incomplete completeness report).

mod batch;
mod eval;
mod wizard;

use std::fs;
use std::io::{BufRead, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use policygen_core::engine::Session;
use policygen_core::generator::{generate, render, Format, GenerateOptions, ListStyle, PolicyDocument};
use policygen_service::{Catalog, CatalogPaths};

pub use batch::run_batch;
pub use wizard::{run_wizard, WizardOptions, WizardOutcome};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_FLAGGED: u8 = 2;

#[derive(Debug, Parser)]
#[command(name = "policygen", version, about = "Generate and evaluate GDPR privacy policies")]
pub struct Cli {
    #[command(flatten)]
    pub inputs: InputArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Data files; each defaults to the bundled copy.
#[derive(Debug, Clone, Default, Args)]
pub struct InputArgs {
    #[arg(long, global = true, env = "POLICYGEN_BANK")]
    pub bank: Option<PathBuf>,
    #[arg(long, global = true, env = "POLICYGEN_LIBRARY")]
    pub library: Option<PathBuf>,
    #[arg(long, global = true, env = "POLICYGEN_TEMPLATE")]
    pub template: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Plain,
    Md,
    Markdown,
    Html,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Plain => Format::Plain,
            FormatArg::Md | FormatArg::Markdown => Format::Markdown,
            FormatArg::Html => Format::Html,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Policy output file; `-` writes to stdout.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value = "plain")]
    pub format: FormatArg,
    /// Omit the generation timestamp from the header.
    #[arg(long)]
    pub no_timestamp: bool,
    /// Join list answers inline instead of as bullets.
    #[arg(long)]
    pub inline_lists: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Answer the questionnaire interactively.
    Wizard {
        #[command(flatten)]
        output: OutputArgs,
        /// Answers transcript, rewritten after every answer [default: OUT.answers.json].
        #[arg(long)]
        transcript: Option<PathBuf>,
        /// Continue from an existing transcript.
        #[arg(long)]
        resume: bool,
    },
    /// Generate a policy from an answers file.
    Batch {
        #[arg(long)]
        answers: PathBuf,
        #[command(flatten)]
        output: OutputArgs,
        /// Fail unless the answers complete the interview and every placeholder resolves.
        #[arg(long)]
        strict: bool,
    },
    /// Check the question bank (and the template against it).
    LintBank {
        #[arg(long)]
        json: bool,
    },
    /// Check the clause library.
    LintLibrary {
        #[arg(long)]
        json: bool,
        /// Exit 1 on warnings too.
        #[arg(long)]
        deny_warnings: bool,
    },
    /// Readability, completeness and coverage reports.
    #[command(subcommand)]
    Eval(EvalCommand),
    /// Run the HTTP service.
    Serve {
        #[arg(long, env = "POLICYGEN_LISTEN", default_value = "127.0.0.1:8080")]
        listen: SocketAddr,
        #[arg(long, env = "POLICYGEN_STORE", default_value = "sessions")]
        store: PathBuf,
        #[arg(long, env = "POLICYGEN_CRITERIA")]
        criteria: Option<PathBuf>,
        #[arg(long, env = "POLICYGEN_CHECKLIST")]
        checklist: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EvalCommand {
    /// Flesch Reading Ease of a text file (`-` for stdin).
    Readability {
        file: PathBuf,
        #[arg(long, default_value_t = policygen_core::evaluation::DEFAULT_WORDS_PER_MINUTE)]
        words_per_minute: f64,
        #[arg(long)]
        json: bool,
    },
    /// Rate the completeness criteria. Exits 2 when a must criterion is unsatisfied.
    Completeness {
        #[command(flatten)]
        source: PresenceSource,
        #[arg(long)]
        criteria: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Rate the coverage checklist.
    Coverage {
        #[command(flatten)]
        source: PresenceSource,
        #[arg(long)]
        checklist: Option<PathBuf>,
        /// Topic ids that need policymaker review.
        #[arg(long, value_delimiter = ',')]
        review_flags: Vec<String>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Args)]
#[group(required = true, multiple = false)]
pub struct PresenceSource {
    /// Presence file: {present: [paths], conditions: {fact: bool}}.
    #[arg(long)]
    pub presence: Option<PathBuf>,
    /// Derive presence from an answers file instead.
    #[arg(long)]
    pub answers: Option<PathBuf>,
}

pub fn load_catalog(inputs: &InputArgs, criteria: Option<PathBuf>, checklist: Option<PathBuf>) -> Result<Catalog> {
    Ok(Catalog::load(&CatalogPaths {
        bank: inputs.bank.clone(),
        library: inputs.library.clone(),
        template: inputs.template.clone(),
        criteria,
        checklist,
    })?)
}

pub fn read_input(path: &Path, stdin: &mut dyn BufRead) -> Result<Vec<u8>> {
    if path == Path::new("-") {
        let mut buf = Vec::new();
        stdin.read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        fs::read(path).with_context(|| format!("cannot read {}", path.display()))
    }
}

fn write_output(path: &Path, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    if path == Path::new("-") {
        stdout.write_all(bytes)?;
        Ok(())
    } else {
        fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
    }
}

fn timestamp(output: &OutputArgs) -> Option<String> {
    (!output.no_timestamp).then(|| chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
}

/// The one path from a session to policy bytes, shared by wizard and batch.
pub fn render_policy(
    catalog: &Catalog,
    session: &Session,
    strict: bool,
    output: &OutputArgs,
) -> Result<(PolicyDocument, Vec<u8>)> {
    let opts = GenerateOptions {
        strict,
        list_style: if output.inline_lists {
            ListStyle::Inline
        } else {
            ListStyle::Bulleted
        },
        generated_at: timestamp(output),
    };
    let doc = generate(&catalog.template, session, &catalog.library, &opts)?;
    let bytes = render(&doc, output.format.into());
    Ok((doc, bytes))
}

/// Runs a parsed command line. Errors are reported on `stderr`.
pub fn run(cli: Cli, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8 {
    match dispatch(cli, stdin, stdout, stderr) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            EXIT_FAILURE
        }
    }
}

fn dispatch(cli: Cli, stdin: &mut dyn BufRead, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Wizard {
            output,
            transcript,
            resume,
        } => {
            let catalog = load_catalog(&cli.inputs, None, None)?;
            let transcript = transcript.unwrap_or_else(|| {
                let mut p = output.out.clone().into_os_string();
                p.push(".answers.json");
                PathBuf::from(p)
            });
            let opts = WizardOptions {
                output,
                transcript,
                resume,
                interactive: std::io::IsTerminal::is_terminal(&std::io::stdin()),
            };
            run_wizard(&catalog, &opts, stdin, stdout, stderr).map(|o| o.exit_code())
        }
        Command::Batch {
            answers,
            output,
            strict,
        } => {
            let catalog = load_catalog(&cli.inputs, None, None)?;
            let bytes = read_input(&answers, stdin)?;
            run_batch(&catalog, &bytes, &output, strict, stdout, stderr)
        }
        Command::LintBank { json } => eval::lint_bank(&cli.inputs, json, stdout),
        Command::LintLibrary { json, deny_warnings } => eval::lint_library(&cli.inputs, json, deny_warnings, stdout),
        Command::Eval(cmd) => eval::run(&cli.inputs, cmd, stdin, stdout),
        Command::Serve {
            listen,
            store,
            criteria,
            checklist,
        } => {
            let config = policygen_service::ServiceConfig {
                listen,
                store_dir: store,
                catalog: CatalogPaths {
                    bank: cli.inputs.bank,
                    library: cli.inputs.library,
                    template: cli.inputs.template,
                    criteria,
                    checklist,
                },
            };
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(policygen_service::serve(config))?;
            Ok(EXIT_OK)
        }
    }
}
