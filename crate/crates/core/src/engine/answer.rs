use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::bank::{BindingMatcher, QType, Question, Selector};
use super::EngineError;
use crate::library::placeholder::contains_placeholder_like;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum YesNo {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
}

impl YesNo {
    pub fn as_str(self) -> &'static str {
        match self {
            YesNo::Yes => "YES",
            YesNo::No => "NO",
        }
    }
}

/// A typed answer. Serialized tagged by question type, e.g. `{"BOOL": "YES"}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnswerValue {
    #[serde(rename = "BOOL")]
    Bool(YesNo),
    #[serde(rename = "INFO")]
    Text(String),
    #[serde(rename = "MTPC")]
    Choices(Vec<String>),
}

impl AnswerValue {
    pub fn yes() -> Self {
        AnswerValue::Bool(YesNo::Yes)
    }

    pub fn no() -> Self {
        AnswerValue::Bool(YesNo::No)
    }

    pub fn text(s: impl Into<String>) -> Self {
        AnswerValue::Text(s.into())
    }

    pub fn choices<I, S>(items: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        AnswerValue::Choices(items.into_iter().map(Into::into).collect())
    }

    pub fn shape(&self) -> QType {
        match self {
            AnswerValue::Bool(_) => QType::Bool,
            AnswerValue::Text(_) => QType::Info,
            AnswerValue::Choices(_) => QType::Mtpc,
        }
    }

    /// The flow edge this answer takes.
    pub fn selector(&self) -> Selector {
        match self {
            AnswerValue::Bool(YesNo::Yes) => Selector::Yes,
            AnswerValue::Bool(YesNo::No) => Selector::No,
            _ => Selector::Any,
        }
    }

    pub fn matches(&self, matcher: &BindingMatcher) -> bool {
        match (matcher, self) {
            (BindingMatcher::Yes, AnswerValue::Bool(YesNo::Yes)) => true,
            (BindingMatcher::No, AnswerValue::Bool(YesNo::No)) => true,
            (BindingMatcher::Answered, AnswerValue::Text(_) | AnswerValue::Choices(_)) => true,
            (BindingMatcher::Option(o), AnswerValue::Choices(c)) => c.contains(o),
            _ => false,
        }
    }

    /// Untyped wire form: `"YES"`/`"NO"`, a string, or an array of strings.
    pub fn to_json(&self) -> Value {
        match self {
            AnswerValue::Bool(b) => Value::String(b.as_str().into()),
            AnswerValue::Text(t) => Value::String(t.clone()),
            AnswerValue::Choices(c) => Value::Array(c.iter().cloned().map(Value::String).collect()),
        }
    }

    /// Decodes the wire form against the question type that will receive it.
    pub fn from_json(qnum: &str, qtype: QType, value: &Value) -> Result<Self, EngineError> {
        let mismatch = || EngineError::ShapeMismatch {
            qnum: qnum.to_string(),
            expected: qtype,
            found: json_kind(value),
        };
        match qtype {
            QType::Bool => match value {
                Value::String(s) if s.eq_ignore_ascii_case("yes") => Ok(AnswerValue::yes()),
                Value::String(s) if s.eq_ignore_ascii_case("no") => Ok(AnswerValue::no()),
                Value::Bool(true) => Ok(AnswerValue::yes()),
                Value::Bool(false) => Ok(AnswerValue::no()),
                _ => Err(mismatch()),
            },
            QType::Info => match value {
                Value::String(s) => Ok(AnswerValue::Text(s.clone())),
                _ => Err(mismatch()),
            },
            QType::Mtpc => match value {
                Value::Array(items) => items
                    .iter()
                    .map(|v| v.as_str().map(str::to_string).ok_or_else(mismatch))
                    .collect::<Result<Vec<_>, _>>()
                    .map(AnswerValue::Choices),
                Value::String(s) => Ok(AnswerValue::Choices(vec![s.clone()])),
                _ => Err(mismatch()),
            },
        }
    }

    /// Checks the value against `question` and returns its canonical form:
    /// trimmed text, MTPC selections de-duplicated in declared option order.
    pub fn validate_for(&self, question: &Question) -> Result<AnswerValue, EngineError> {
        let qnum = question.qnum.as_str();
        if self.shape() != question.qtype {
            return Err(EngineError::ShapeMismatch {
                qnum: qnum.to_string(),
                expected: question.qtype,
                found: self.shape().as_str(),
            });
        }
        match self {
            AnswerValue::Bool(_) => Ok(self.clone()),
            AnswerValue::Text(t) => {
                let t = t.trim();
                if t.is_empty() {
                    return Err(EngineError::EmptyText(qnum.to_string()));
                }
                if contains_placeholder_like(t) {
                    return Err(EngineError::PlaceholderInAnswer(qnum.to_string()));
                }
                Ok(AnswerValue::Text(t.to_string()))
            }
            AnswerValue::Choices(picked) => {
                if picked.is_empty() {
                    return Err(EngineError::EmptySelection(qnum.to_string()));
                }
                if let Some(bad) = picked.iter().find(|p| !question.options.contains(p)) {
                    return Err(EngineError::OptionNotOffered {
                        qnum: qnum.to_string(),
                        option: bad.clone(),
                    });
                }
                Ok(AnswerValue::Choices(
                    question
                        .options
                        .iter()
                        .filter(|o| picked.contains(o))
                        .cloned()
                        .collect(),
                ))
            }
        }
    }

    /// Placeholder value: text verbatim, selections joined with ", ".
    pub fn placeholder_value(&self) -> Option<String> {
        match self {
            AnswerValue::Bool(_) => None,
            AnswerValue::Text(t) => Some(t.clone()),
            AnswerValue::Choices(c) => Some(c.join(", ")),
        }
    }
}

fn json_kind(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "boolean",
        Value::Number(_) => "number",
        Value::String(_) => "string",
        Value::Array(_) => "array",
        Value::Object(_) => "object",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn wire_decoding() {
        assert_eq!(
            AnswerValue::from_json("Q2", QType::Bool, &json!("YES")).unwrap(),
            AnswerValue::yes()
        );
        assert_eq!(
            AnswerValue::from_json("Q2", QType::Bool, &json!("no")).unwrap(),
            AnswerValue::no()
        );
        assert!(AnswerValue::from_json("Q2", QType::Bool, &json!("maybe")).is_err());
        assert_eq!(
            AnswerValue::from_json("Q1", QType::Info, &json!("YES")).unwrap(),
            AnswerValue::text("YES")
        );
        assert!(AnswerValue::from_json("Q89", QType::Mtpc, &json!([1])).is_err());
    }

    #[test]
    fn wire_round_trip() {
        for v in [
            AnswerValue::yes(),
            AnswerValue::text("Acme"),
            AnswerValue::choices(["a", "b"]),
        ] {
            assert_eq!(AnswerValue::from_json("Q", v.shape(), &v.to_json()).unwrap(), v);
        }
    }
}
