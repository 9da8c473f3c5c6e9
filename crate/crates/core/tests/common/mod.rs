#![allow(dead_code)]

use std::path::PathBuf;

use policygen_core::engine::{load_bank, AnswerValue, AnswersFile, QType, Question, QuestionBank, Session};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> Vec<u8> {
    std::fs::read(fixture(name)).unwrap()
}

pub fn sample_bank() -> QuestionBank {
    load_bank(&read_fixture("sample_bank.json")).unwrap()
}

pub fn replay_fixture(name: &str, bank: &QuestionBank) -> Session {
    AnswersFile::parse(&read_fixture(name)).unwrap().replay(bank).unwrap()
}

/// A valid answer to `q` chosen by `pick` (any integer source).
pub fn answer_for(q: &Question, pick: u64) -> AnswerValue {
    match q.qtype {
        QType::Bool => {
            if pick.is_multiple_of(2) {
                AnswerValue::yes()
            } else {
                AnswerValue::no()
            }
        }
        QType::Info => AnswerValue::text(format!("value {} for {}", pick % 1000, q.qnum)),
        QType::Mtpc => {
            let n = q.options.len();
            let mut chosen: Vec<String> = q
                .options
                .iter()
                .enumerate()
                .filter(|(i, _)| (pick >> (i % 60)) & 1 == 1)
                .map(|(_, o)| o.clone())
                .collect();
            if chosen.is_empty() {
                chosen.push(q.options[(pick as usize) % n].clone());
            }
            AnswerValue::Choices(chosen)
        }
    }
}

/// Answers questions with the given picks until the picks run out or the session completes.
pub fn walk(bank: &QuestionBank, picks: &[u64]) -> Session {
    let mut s = Session::start(bank);
    for &p in picks {
        let Some(q) = s.cursor().qnum().map(str::to_string) else {
            break;
        };
        let v = answer_for(bank.get(&q).unwrap(), p);
        s.submit_answer(bank, v).unwrap();
    }
    s
}
