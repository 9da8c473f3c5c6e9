mod common;

use std::collections::BTreeMap;

use common::{answer_for, sample_bank, walk};
use policygen_core::engine::{
    AnswerValue, AnswersFile, Cursor, EngineError, FlowTarget, QuestionBank, Selector, Session, YesNo,
};
use policygen_core::shipped;
use proptest::prelude::*;

fn next_after(bank: &QuestionBank, answers: &[(&str, AnswerValue)]) -> Cursor {
    let mut s = Session::start(bank);
    for (q, v) in answers {
        assert_eq!(s.cursor().qnum(), Some(*q));
        s.submit_answer(bank, v.clone()).unwrap();
    }
    s.cursor().clone()
}

fn at(q: &str) -> Cursor {
    Cursor::At(q.to_string())
}

fn prefix_to_q88() -> Vec<(&'static str, AnswerValue)> {
    vec![
        ("Q104", AnswerValue::yes()),
        ("Q1", AnswerValue::text("Acme Learning Ltd")),
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
    ]
}

#[test]
fn sample_bank_loads_with_nine_questions() {
    let bank = sample_bank();
    assert_eq!(bank.len(), 9);
    assert_eq!(Session::start(&bank).cursor(), &at("Q1"));
}

#[test]
fn seed_bank_starts_at_q104() {
    let bank = shipped::bank();
    let a = Session::start(&bank);
    let b = Session::start(&bank);
    assert_eq!(a.cursor(), &at("Q104"));
    assert_eq!(a, b);
    assert_eq!(a.trail(), ["Q104"]);
}

#[test]
fn published_flow_traces() {
    let bank = shipped::bank();
    let head = [
        ("Q104", AnswerValue::yes()),
        ("Q1", AnswerValue::text("Acme Learning Ltd")),
    ];
    let mut yes = head.to_vec();
    yes.push(("Q2", AnswerValue::yes()));
    assert_eq!(next_after(&bank, &yes), at("Q166"));
    let mut no = head.to_vec();
    no.push(("Q2", AnswerValue::no()));
    assert_eq!(next_after(&bank, &no), at("Q3"));

    let mut p = prefix_to_q88();
    p.push(("Q88", AnswerValue::yes()));
    assert_eq!(next_after(&bank, &p), at("Q89"));
    let mut p = prefix_to_q88();
    p.push(("Q88", AnswerValue::no()));
    assert_eq!(next_after(&bank, &p), at("Q93"));

    let mut p = prefix_to_q88();
    p.push(("Q88", AnswerValue::yes()));
    p.push(("Q89", AnswerValue::choices(["To resolve disputes"])));
    let mut y = p.clone();
    y.push(("Q90", AnswerValue::yes()));
    assert_eq!(next_after(&bank, &y), at("Q91"));
    p.push(("Q90", AnswerValue::no()));
    assert_eq!(next_after(&bank, &p), at("Q92"));
}

#[test]
fn sample_bank_q2_branches() {
    let bank = sample_bank();
    let q1 = ("Q1", AnswerValue::text("Acme"));
    assert_eq!(next_after(&bank, &[q1.clone(), ("Q2", AnswerValue::yes())]), at("Q166"));
    assert_eq!(next_after(&bank, &[q1, ("Q2", AnswerValue::no())]), at("Q3"));
}

#[test]
fn clause_bindings_match_sample() {
    let bank = sample_bank();
    let mut s = Session::start(&bank);
    s.submit_answer(&bank, AnswerValue::text("Acme Learning Ltd")).unwrap();
    assert_eq!(s.selected_clauses(), ["C2", "C3"]);
    assert_eq!(s.placeholder_values()["CONTROLLER'S LEGAL NAME"], "Acme Learning Ltd");
    assert_eq!(s.cursor(), &at("Q2"));

    s.submit_answer(&bank, AnswerValue::yes()).unwrap();
    s.submit_answer(&bank, AnswerValue::text("8324083")).unwrap();
    assert_eq!(s.selected_clauses(), ["C2", "C3", "C4"]);
    assert_eq!(s.placeholder_values()["CONTROLLER'S REGISTER NUMBER"], "8324083");

    s.submit_answer(&bank, AnswerValue::text("addr")).unwrap();
    s.submit_answer(&bank, AnswerValue::text("mail")).unwrap();
    s.submit_answer(&bank, AnswerValue::yes()).unwrap();
    assert_eq!(s.selected_clauses(), ["C2", "C3", "C4", "C5", "C6"]);
}

#[test]
fn active_outputs_examples() {
    let bank = sample_bank();
    let fresh = Session::start(&bank).active_outputs();
    assert!(fresh.placeholders.is_empty() && fresh.clauses.is_empty());

    let mut s = Session::start(&bank);
    s.submit_answer(&bank, AnswerValue::text("Acme Learning Ltd")).unwrap();
    s.submit_answer(&bank, AnswerValue::no()).unwrap();
    let out = s.active_outputs();
    assert_eq!(
        out.placeholders,
        BTreeMap::from([("CONTROLLER'S LEGAL NAME".to_string(), "Acme Learning Ltd".to_string())])
    );
    assert_eq!(out.clauses, ["C2", "C3"]);
}

#[test]
fn mtpc_selection_is_stored_in_option_order() {
    let bank = sample_bank();
    let mut s = common::walk(&bank, &[0, 1, 0, 0, 0]);
    assert_eq!(s.cursor(), &at("Q88"));
    s.submit_answer(&bank, AnswerValue::yes()).unwrap();
    s.submit_answer(
        &bank,
        AnswerValue::choices(["To comply with legal obligations", "To resolve disputes"]),
    )
    .unwrap();
    assert_eq!(
        s.placeholder_values()["PD TIME STORED CRITERIA"],
        "To resolve disputes, To comply with legal obligations"
    );
    assert_eq!(s.cursor(), &at("Q90"));
}

#[test]
fn submit_errors() {
    let bank = sample_bank();
    let mut s = Session::start(&bank);
    assert!(matches!(
        s.submit_answer(&bank, AnswerValue::yes()),
        Err(EngineError::ShapeMismatch { .. })
    ));
    assert!(matches!(
        s.submit_answer(&bank, AnswerValue::text("  ")),
        Err(EngineError::EmptyText(_))
    ));
    assert!(matches!(
        s.submit_answer(&bank, AnswerValue::text("[SOMETHING]")),
        Err(EngineError::PlaceholderInAnswer(_))
    ));
    assert_eq!(s, Session::start(&bank));
    let mut s = walk(&bank, &[0, 1, 0, 0, 0, 0]);
    assert!(matches!(
        s.submit_answer(&bank, AnswerValue::choices(["Not an option"])),
        Err(EngineError::OptionNotOffered { .. })
    ));
    assert!(matches!(
        s.submit_answer(&bank, AnswerValue::Choices(vec![])),
        Err(EngineError::EmptySelection(_))
    ));
}

#[test]
fn amend_q2_inactivates_q166() {
    let bank = sample_bank();
    let mut s = walk(&bank, &[0, 0, 0]);
    assert!(s.is_active("Q166"));
    s.amend_answer(&bank, "Q2", AnswerValue::no()).unwrap();
    assert!(!s.is_active("Q166"));
    assert!(s.answer("Q166").is_some());
    assert_eq!(s.inactive_qnums(), ["Q166"]);
    assert!(!s.placeholder_values().contains_key("CONTROLLER'S REGISTER NUMBER"));
    assert!(!s.selected_clauses().contains(&"C4".to_string()));
    assert_eq!(s.trail(), ["Q1", "Q2", "Q3"]);
    assert_eq!(s.cursor(), &at("Q3"));

    // flipping back reuses the retained answer
    s.amend_answer(&bank, "Q2", AnswerValue::yes()).unwrap();
    assert!(s.is_active("Q166"));
    assert_eq!(s.cursor(), &at("Q3"));
}

#[test]
fn amend_to_same_value_is_a_no_op() {
    let bank = sample_bank();
    let mut s = walk(&bank, &[0, 0, 0]);
    let before = s.clone();
    s.amend_answer(&bank, "Q2", AnswerValue::yes()).unwrap();
    assert_eq!(s, before);
}

#[test]
fn amend_errors() {
    let bank = sample_bank();
    let mut s = walk(&bank, &[0]);
    assert!(matches!(
        s.amend_answer(&bank, "Q3", AnswerValue::text("x")),
        Err(EngineError::NotAnswered(_))
    ));
    assert!(matches!(
        s.amend_answer(&bank, "Q1", AnswerValue::yes()),
        Err(EngineError::ShapeMismatch { .. })
    ));
}

#[test]
fn amend_in_completed_session_reopens_flow() {
    let bank = shipped::bank();
    let mut s = common::replay_fixture("registered_answers.json", &bank);
    assert!(s.is_completed());
    s.amend_answer(&bank, "Q88", AnswerValue::yes()).unwrap();
    assert_eq!(s.cursor(), &at("Q89"));
    assert_eq!(oracle_trail(&bank, &s), (s.trail().to_vec(), s.cursor().clone()));
}

#[test]
fn completed_session_rejects_answers() {
    let bank = shipped::bank();
    let mut s = Session::start(&bank);
    s.submit_answer(&bank, AnswerValue::no()).unwrap();
    assert!(s.is_completed());
    assert!(matches!(
        s.submit_answer(&bank, AnswerValue::yes()),
        Err(EngineError::SessionCompleted)
    ));
}

#[test]
fn snapshot_round_trip_and_tamper_detection() {
    let bank = shipped::bank();
    let s = common::replay_fixture("moodle_answers.json", &bank);
    let json = s.to_json();
    assert_eq!(Session::from_json(json.as_bytes(), &bank).unwrap(), s);
    let tampered = json.replacen("\"COMPLETED\"", "\"Q5\"", 1);
    assert!(matches!(
        Session::from_json(tampered.as_bytes(), &bank),
        Err(EngineError::CorruptSession(_))
    ));
    assert!(Session::from_json(&json.as_bytes()[..json.len() / 2], &bank).is_err());
}

#[test]
fn answers_file_round_trip() {
    let bank = shipped::bank();
    let s = common::replay_fixture("moodle_answers.json", &bank);
    let transcript = AnswersFile::from_session(&s);
    let again = transcript.replay(&bank).unwrap();
    assert_eq!(again.active_outputs(), s.active_outputs());
    assert_eq!(again.trail(), s.trail());
}

#[test]
fn answers_file_names_offending_qnum() {
    let bank = shipped::bank();
    let doc = br#"{"answers":[{"qnum":"Q104","value":"YES"},{"qnum":"Q2","value":"YES"}]}"#;
    let err = AnswersFile::parse(doc).unwrap().replay(&bank).unwrap_err();
    assert_eq!(err.qnum, "Q2");
    assert!(err.to_string().contains("expected an answer to Q1"), "{err}");
}

/// Independent trail computation: follows edges directly from the bank document.
fn oracle_trail(bank: &QuestionBank, s: &Session) -> (Vec<String>, Cursor) {
    let doc = bank.document();
    let mut trail = vec![doc.entry.clone()];
    loop {
        let q = trail.last().unwrap().clone();
        let Some(rec) = s.answers().get(&q) else {
            return (trail, Cursor::At(q));
        };
        let question = doc.questions.iter().find(|x| x.qnum == q).unwrap();
        let target = match &rec.value {
            AnswerValue::Bool(YesNo::Yes) => question.flow.yes.as_ref(),
            AnswerValue::Bool(YesNo::No) => question.flow.no.as_ref(),
            _ => question.flow.any.as_ref(),
        }
        .unwrap();
        match target {
            FlowTarget::End => return (trail, Cursor::Completed),
            FlowTarget::Question(n) => trail.push(n.clone()),
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    Submit(u64),
    Amend(usize, u64),
}

fn ops() -> impl Strategy<Value = Vec<Op>> {
    prop::collection::vec(
        prop_oneof![3 => any::<u64>().prop_map(Op::Submit), 1 => (any::<usize>(), any::<u64>()).prop_map(|(i, p)| Op::Amend(i, p))],
        0..60,
    )
}

fn apply(bank: &QuestionBank, ops: &[Op]) -> Session {
    let mut s = Session::start(bank);
    for op in ops {
        match *op {
            Op::Submit(p) => {
                if let Some(q) = s.cursor().qnum().map(str::to_string) {
                    s.submit_answer(bank, answer_for(bank.get(&q).unwrap(), p)).unwrap();
                }
            }
            Op::Amend(i, p) => {
                let answered: Vec<String> = s.answers().keys().cloned().collect();
                if answered.is_empty() {
                    continue;
                }
                let q = &answered[i % answered.len()];
                s.amend_answer(bank, q, answer_for(bank.get(q).unwrap(), p)).unwrap();
            }
        }
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn replay_equivalence(ops in ops()) {
        let bank = shipped::bank();
        let s = apply(&bank, &ops);
        prop_assert_eq!(oracle_trail(&bank, &s), (s.trail().to_vec(), s.cursor().clone()));
        prop_assert!(s.verify(&bank).is_ok());
        // every active placeholder is declared by an answered question on the trail
        for name in s.placeholder_values().keys() {
            let owner = bank.placeholder_owner(name).unwrap();
            prop_assert!(s.is_active(&owner.qnum));
        }
    }

    #[test]
    fn determinism(ops in ops()) {
        let bank = shipped::bank();
        prop_assert_eq!(apply(&bank, &ops).to_json(), apply(&bank, &ops).to_json());
    }

    #[test]
    fn progress_and_termination(picks in prop::collection::vec(any::<u64>(), 0..80)) {
        let bank = shipped::bank();
        let mut s = Session::start(&bank);
        for p in picks {
            let Some(q) = s.cursor().qnum().map(str::to_string) else { break };
            let before = s.trail().len();
            s.submit_answer(&bank, answer_for(bank.get(&q).unwrap(), p)).unwrap();
            prop_assert!(s.is_completed() || s.trail().len() > before);
        }
        prop_assert!(s.trail().len() <= bank.len());
        let full = walk(&bank, &[0; 200]);
        prop_assert!(full.is_completed());
    }

    #[test]
    fn amend_then_restore(picks in prop::collection::vec(any::<u64>(), 1..40), which in any::<usize>(), alt in any::<u64>()) {
        let bank = shipped::bank();
        let mut s = walk(&bank, &picks);
        let original = s.active_outputs();
        let answered: Vec<String> = s.answers().keys().cloned().collect();
        let q = answered[which % answered.len()].clone();
        let old = s.answer(&q).unwrap().value.clone();
        s.amend_answer(&bank, &q, answer_for(bank.get(&q).unwrap(), alt)).unwrap();
        s.amend_answer(&bank, &q, old).unwrap();
        prop_assert_eq!(s.active_outputs(), original);
    }

    #[test]
    fn contributions_follow_selectors(ops in ops()) {
        let bank = shipped::bank();
        let s = apply(&bank, &ops);
        for c in s.contributions() {
            let rec = s.answer(&c.qnum).unwrap();
            prop_assert!(s.is_active(&c.qnum));
            prop_assert_eq!(rec.value.selector(), c.selector);
            if c.selector == Selector::Any {
                prop_assert!(!matches!(rec.value, AnswerValue::Bool(_)));
            }
        }
    }
}
