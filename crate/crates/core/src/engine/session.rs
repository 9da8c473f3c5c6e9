use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::answer::AnswerValue;
use super::bank::{FlowTarget, QuestionBank, Selector};
use super::EngineError;
use crate::json;

/// Where the interview stands.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Cursor {
    At(String),
    Completed,
}

impl Cursor {
    pub fn qnum(&self) -> Option<&str> {
        match self {
            Cursor::At(q) => Some(q),
            Cursor::Completed => None,
        }
    }

    pub fn is_completed(&self) -> bool {
        matches!(self, Cursor::Completed)
    }
}

impl fmt::Display for Cursor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cursor::At(q) => f.write_str(q),
            Cursor::Completed => f.write_str("COMPLETED"),
        }
    }
}

impl Serialize for Cursor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Cursor {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Ok(if s == "COMPLETED" {
            Cursor::Completed
        } else {
            Cursor::At(s)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerRecord {
    pub value: AnswerValue,
    /// Monotonic per-session sequence number.
    pub answered_at: u64,
}

/// One clause selected by one active answer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Contribution {
    pub qnum: String,
    /// The flow edge the answer took.
    pub selector: Selector,
    pub clause: String,
}

/// What the engine hands to the generator: captured placeholder values and
/// selected clause ids (trail order, then binding order).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActiveOutputs {
    pub placeholders: BTreeMap<String, String>,
    /// MTPC selections by placeholder, in option order.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lists: BTreeMap<String, Vec<String>>,
    pub clauses: Vec<String>,
    #[serde(default)]
    pub contributions: Vec<Contribution>,
}

/// A policymaker's interview state.
///
/// Answers on questions that fall off the trail after an amendment are kept
/// but contribute nothing until the trail passes through them again.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Session {
    bank_version: String,
    answers: BTreeMap<String, AnswerRecord>,
    trail: Vec<String>,
    cursor: Cursor,
    placeholder_values: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    placeholder_lists: BTreeMap<String, Vec<String>>,
    selected_clauses: Vec<String>,
    contributions: Vec<Contribution>,
    next_seq: u64,
}

/// Walks the flow from `bank.entry()` through `answers`. Stops at the first
/// unanswered question or at END.
pub fn replay(bank: &QuestionBank, answers: &BTreeMap<String, AnswerRecord>) -> (Vec<String>, Cursor) {
    let mut trail = vec![bank.entry().to_string()];
    let cursor = follow(bank, answers, &mut trail);
    (trail, cursor)
}

/// Extends `trail` (whose last element is the current question) while answers exist.
fn follow(bank: &QuestionBank, answers: &BTreeMap<String, AnswerRecord>, trail: &mut Vec<String>) -> Cursor {
    loop {
        let at = trail.last().expect("trail is never empty").clone();
        let Some(record) = answers.get(&at) else {
            return Cursor::At(at);
        };
        // Bank validation guarantees the edge exists and the target is present and acyclic.
        let target = bank
            .get(&at)
            .and_then(|q| q.flow.edge(record.value.selector()))
            .cloned()
            .unwrap_or(FlowTarget::End);
        match target {
            FlowTarget::End => return Cursor::Completed,
            FlowTarget::Question(next) => trail.push(next),
        }
    }
}

impl Session {
    pub fn start(bank: &QuestionBank) -> Self {
        Self {
            bank_version: bank.version().to_string(),
            answers: BTreeMap::new(),
            trail: vec![bank.entry().to_string()],
            cursor: Cursor::At(bank.entry().to_string()),
            placeholder_values: BTreeMap::new(),
            placeholder_lists: BTreeMap::new(),
            selected_clauses: Vec::new(),
            contributions: Vec::new(),
            next_seq: 0,
        }
    }

    pub fn bank_version(&self) -> &str {
        &self.bank_version
    }

    pub fn cursor(&self) -> &Cursor {
        &self.cursor
    }

    pub fn is_completed(&self) -> bool {
        self.cursor.is_completed()
    }

    pub fn trail(&self) -> &[String] {
        &self.trail
    }

    /// Every recorded answer, active or not.
    pub fn answers(&self) -> &BTreeMap<String, AnswerRecord> {
        &self.answers
    }

    pub fn answer(&self, qnum: &str) -> Option<&AnswerRecord> {
        self.answers.get(qnum)
    }

    /// Whether `qnum` is answered and on the current trail.
    pub fn is_active(&self, qnum: &str) -> bool {
        self.answers.contains_key(qnum) && self.trail.iter().any(|q| q == qnum)
    }

    /// Active answers in trail order.
    pub fn active_answers(&self) -> impl Iterator<Item = (&str, &AnswerRecord)> {
        self.trail
            .iter()
            .filter_map(|q| self.answers.get(q).map(|r| (q.as_str(), r)))
    }

    /// Answered questions that the current trail no longer visits.
    pub fn inactive_qnums(&self) -> Vec<&str> {
        self.answers
            .keys()
            .filter(|q| !self.trail.contains(q))
            .map(String::as_str)
            .collect()
    }

    pub fn placeholder_values(&self) -> &BTreeMap<String, String> {
        &self.placeholder_values
    }

    pub fn selected_clauses(&self) -> &[String] {
        &self.selected_clauses
    }

    pub fn contributions(&self) -> &[Contribution] {
        &self.contributions
    }

    pub fn active_outputs(&self) -> ActiveOutputs {
        ActiveOutputs {
            placeholders: self.placeholder_values.clone(),
            lists: self.placeholder_lists.clone(),
            clauses: self.selected_clauses.clone(),
            contributions: self.contributions.clone(),
        }
    }

    fn check_bank(&self, bank: &QuestionBank) -> Result<(), EngineError> {
        if self.bank_version != bank.version() {
            return Err(EngineError::BankMismatch {
                session: self.bank_version.clone(),
                bank: bank.version().to_string(),
            });
        }
        Ok(())
    }

    /// Answers the current question and advances along its flow edge. If the
    /// edge leads to a question that still holds a retained answer, the walk
    /// continues through it.
    pub fn submit_answer(&mut self, bank: &QuestionBank, value: AnswerValue) -> Result<&Cursor, EngineError> {
        self.check_bank(bank)?;
        let qnum = match &self.cursor {
            Cursor::At(q) => q.clone(),
            Cursor::Completed => return Err(EngineError::SessionCompleted),
        };
        let question = bank.question(&qnum)?;
        let value = value.validate_for(question)?;
        let seq = self.next_seq;
        self.next_seq += 1;
        self.answers.insert(
            qnum,
            AnswerRecord {
                value,
                answered_at: seq,
            },
        );
        self.cursor = follow(bank, &self.answers, &mut self.trail);
        self.refresh_outputs(bank);
        Ok(&self.cursor)
    }

    /// Replaces a previous answer and replays the flow from the entry.
    pub fn amend_answer(
        &mut self,
        bank: &QuestionBank,
        qnum: &str,
        value: AnswerValue,
    ) -> Result<&Cursor, EngineError> {
        self.check_bank(bank)?;
        if !self.answers.contains_key(qnum) {
            return Err(EngineError::NotAnswered(qnum.to_string()));
        }
        let value = value.validate_for(bank.question(qnum)?)?;
        if self.answers[qnum].value == value {
            return Ok(&self.cursor);
        }
        let seq = self.next_seq;
        self.next_seq += 1;
        self.answers.insert(
            qnum.to_string(),
            AnswerRecord {
                value,
                answered_at: seq,
            },
        );
        let (trail, cursor) = replay(bank, &self.answers);
        self.trail = trail;
        self.cursor = cursor;
        self.refresh_outputs(bank);
        Ok(&self.cursor)
    }

    fn refresh_outputs(&mut self, bank: &QuestionBank) {
        let out = compute_outputs(bank, self);
        self.placeholder_values = out.placeholders;
        self.placeholder_lists = out.lists;
        self.selected_clauses = out.clauses;
        self.contributions = out.contributions;
    }

    /// Condition facts set by active answers.
    pub fn facts(&self, bank: &QuestionBank) -> BTreeMap<String, bool> {
        let mut facts = BTreeMap::new();
        for (qnum, record) in self.active_answers() {
            let Some(binding) = bank.get(qnum).and_then(|q| q.fact.as_ref()) else {
                continue;
            };
            let yes = matches!(record.value, AnswerValue::Bool(super::YesNo::Yes));
            facts.insert(binding.name.clone(), if yes { binding.yes } else { !binding.yes });
        }
        facts
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("session serializes")
    }

    /// Restores a snapshot and re-verifies it against `bank`.
    pub fn from_json(bytes: &[u8], bank: &QuestionBank) -> Result<Self, EngineError> {
        let session: Session = json::from_slice(bytes)?;
        session.verify(bank)?;
        Ok(session)
    }

    /// Checks every stored answer against the bank and that the trail, cursor
    /// and outputs equal a fresh replay.
    pub fn verify(&self, bank: &QuestionBank) -> Result<(), EngineError> {
        self.check_bank(bank)?;
        let corrupt = |msg: String| Err(EngineError::CorruptSession(msg));
        for (qnum, record) in &self.answers {
            let question = bank.question(qnum)?;
            let canonical = record.value.validate_for(question)?;
            if canonical != record.value {
                return corrupt(format!("answer to {qnum} is not in canonical form"));
            }
            if record.answered_at >= self.next_seq {
                return corrupt(format!(
                    "answer to {qnum} has sequence {} beyond counter",
                    record.answered_at
                ));
            }
        }
        let (trail, cursor) = replay(bank, &self.answers);
        if trail != self.trail || cursor != self.cursor {
            return corrupt("trail does not match a replay of the answers".into());
        }
        if compute_outputs(bank, self) != self.active_outputs() {
            return corrupt("captured outputs do not match the active answers".into());
        }
        Ok(())
    }
}

fn compute_outputs(bank: &QuestionBank, session: &Session) -> ActiveOutputs {
    let mut out = ActiveOutputs::default();
    for (qnum, record) in session.active_answers() {
        let Some(question) = bank.get(qnum) else { continue };
        if let (Some(name), Some(value)) = (&question.placeholder, record.value.placeholder_value()) {
            out.placeholders.insert(name.clone(), value);
            if let AnswerValue::Choices(items) = &record.value {
                out.lists.insert(name.clone(), items.clone());
            }
        }
        for binding in &question.clause_bindings {
            if !record.value.matches(&binding.on) {
                continue;
            }
            for clause in &binding.clauses {
                out.clauses.push(clause.clone());
                out.contributions.push(Contribution {
                    qnum: qnum.to_string(),
                    selector: record.value.selector(),
                    clause: clause.clone(),
                });
            }
        }
    }
    out
}

/// Starts a session at the bank's entry question.
pub fn start_session(bank: &QuestionBank) -> Session {
    Session::start(bank)
}
