use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::answer::AnswerValue;
use super::bank::QuestionBank;
use super::session::{Cursor, Session};
use super::EngineError;
use crate::json;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerEntry {
    pub qnum: String,
    pub value: Value,
}

/// Ordered answers that replay a session from the bank's entry question.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswersFile {
    pub answers: Vec<AnswerEntry>,
}

#[derive(Debug, thiserror::Error)]
#[error("invalid replay at answer #{index} ({qnum}): {source}")]
pub struct ReplayError {
    pub index: usize,
    pub qnum: String,
    #[source]
    pub source: EngineError,
}

impl AnswersFile {
    pub fn parse(bytes: &[u8]) -> Result<Self, EngineError> {
        Ok(json::from_slice(bytes)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("answers serialize")
    }

    pub fn push(&mut self, qnum: impl Into<String>, value: &AnswerValue) {
        self.answers.push(AnswerEntry {
            qnum: qnum.into(),
            value: value.to_json(),
        });
    }

    /// The active answers of `session` in trail order.
    pub fn from_session(session: &Session) -> Self {
        let mut file = AnswersFile::default();
        for (qnum, record) in session.active_answers() {
            file.push(qnum, &record.value);
        }
        file
    }

    /// Feeds the answers through `submit_answer` in order. Each entry must
    /// target the question the cursor is on.
    pub fn replay(&self, bank: &QuestionBank) -> Result<Session, ReplayError> {
        let mut session = Session::start(bank);
        for (index, entry) in self.answers.iter().enumerate() {
            let fail = |source| ReplayError {
                index,
                qnum: entry.qnum.clone(),
                source,
            };
            match session.cursor() {
                Cursor::Completed => return Err(fail(EngineError::SessionCompleted)),
                Cursor::At(q) if *q != entry.qnum => {
                    return Err(fail(EngineError::OutOfOrder {
                        expected: q.clone(),
                        found: entry.qnum.clone(),
                    }))
                }
                Cursor::At(_) => {}
            }
            let question = bank.question(&entry.qnum).map_err(fail)?;
            let value = AnswerValue::from_json(&entry.qnum, question.qtype, &entry.value).map_err(fail)?;
            session.submit_answer(bank, value).map_err(fail)?;
        }
        Ok(session)
    }
}
