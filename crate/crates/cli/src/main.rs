use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use policygen_cli::{run, Cli};

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_env("POLICYGEN_LOG").unwrap_or_else(|_| "info".into()))
        .with_writer(io::stderr)
        .init();
    let cli = Cli::parse();
    let stdin = io::stdin();
    let mut stdin = stdin.lock();
    let mut stdout = io::stdout().lock();
    let code = run(cli, &mut stdin, &mut stdout, &mut io::stderr());
    let _ = stdout.flush();
    ExitCode::from(code)
}
