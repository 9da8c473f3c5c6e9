#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use policygen_core::engine::{AnswersFile, QType};
use policygen_core::shipped;

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_policygen"));
    for var in [
        "POLICYGEN_BANK",
        "POLICYGEN_LIBRARY",
        "POLICYGEN_TEMPLATE",
        "POLICYGEN_LOG",
    ] {
        c.env_remove(var);
    }
    c
}

pub fn run(args: &[&str], stdin: Option<&[u8]>) -> Output {
    use std::io::Write;
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    {
        let mut pipe = child.stdin.take().unwrap();
        if let Some(input) = stdin {
            pipe.write_all(input).unwrap();
        }
    }
    child.wait_with_output().unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
}

pub fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

/// Typed wizard input reproducing an answers file.
pub fn wizard_script(answers: &Path) -> String {
    let bank = shipped::bank();
    let file = AnswersFile::parse(&std::fs::read(answers).unwrap()).unwrap();
    let mut lines = Vec::new();
    for a in &file.answers {
        let q = bank.get(&a.qnum).unwrap();
        let line = match q.qtype {
            QType::Bool => a.value.as_str().unwrap().to_lowercase(),
            QType::Info => a.value.as_str().unwrap().to_string(),
            QType::Mtpc => a
                .value
                .as_array()
                .unwrap()
                .iter()
                .map(|v| (q.options.iter().position(|o| o == v.as_str().unwrap()).unwrap() + 1).to_string())
                .collect::<Vec<_>>()
                .join(","),
        };
        lines.push(line);
    }
    lines.push(String::new());
    lines.join("\n") + "\n"
}
