//! The interview engine: question banks, answers and sessions.
//!
//! A bank is a set of questions wired by answer-conditioned flow edges. A
//! session walks that graph from the entry question, recording answers,
//! capturing placeholder values and selecting clauses through each
//! question's bindings.

mod answer;
mod bank;
mod session;
mod transcript;

use thiserror::Error;

pub use answer::{AnswerValue, YesNo};
pub use bank::{
    is_qnum, lint_bank, load_bank, BankDocument, BindingMatcher, ClauseBinding, FactBinding, Flow, FlowTarget, QType,
    Question, QuestionBank, SectionInfo, Selector, SECTION_LETTERS,
};
pub use session::{replay, start_session, ActiveOutputs, AnswerRecord, Contribution, Cursor, Session};
pub use transcript::{AnswerEntry, AnswersFile, ReplayError};

use crate::json::JsonError;
use crate::lint::LintIssue;

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("schema violation: {0}")]
    Schema(#[from] JsonError),
    #[error("invalid bank: {}", .0.iter().map(|i| i.message.as_str()).collect::<Vec<_>>().join("; "))]
    InvalidBank(Vec<LintIssue>),
    #[error("unknown question {0}")]
    UnknownQuestion(String),
    #[error("{qnum} expects a {expected} answer, got {found}")]
    ShapeMismatch {
        qnum: String,
        expected: QType,
        found: &'static str,
    },
    #[error("{0} needs a non-empty answer")]
    EmptyText(String),
    #[error("{0} needs at least one selected option")]
    EmptySelection(String),
    #[error("{qnum} does not offer option {option:?}")]
    OptionNotOffered { qnum: String, option: String },
    #[error("answer to {0} must not contain bracketed placeholder tokens")]
    PlaceholderInAnswer(String),
    #[error("session is already completed")]
    SessionCompleted,
    #[error("{0} has not been answered")]
    NotAnswered(String),
    #[error("expected an answer to {expected}, got {found}")]
    OutOfOrder { expected: String, found: String },
    #[error("session was recorded against bank {session}, not {bank}")]
    BankMismatch { session: String, bank: String },
    #[error("corrupt session: {0}")]
    CorruptSession(String),
}
