use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::EngineError;
use crate::json;
use crate::library::placeholder::is_placeholder_name;
use crate::lint::{LintIssue, Severity};

pub const SECTION_LETTERS: &str = "ABCDEFGHIJ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum QType {
    #[serde(rename = "BOOL")]
    Bool,
    #[serde(rename = "INFO")]
    Info,
    #[serde(rename = "MTPC")]
    Mtpc,
}

impl QType {
    pub fn as_str(self) -> &'static str {
        match self {
            QType::Bool => "BOOL",
            QType::Info => "INFO",
            QType::Mtpc => "MTPC",
        }
    }
}

impl fmt::Display for QType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "BOOL" => Ok(QType::Bool),
            "INFO" => Ok(QType::Info),
            "MTPC" => Ok(QType::Mtpc),
            other => Err(other.to_string()),
        }
    }
}

/// Where a flow edge leads.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FlowTarget {
    Question(String),
    End,
}

impl fmt::Display for FlowTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FlowTarget::Question(q) => f.write_str(q),
            FlowTarget::End => f.write_str("END"),
        }
    }
}

impl FromStr for FlowTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "END" {
            Ok(FlowTarget::End)
        } else if is_qnum(s) {
            Ok(FlowTarget::Question(s.to_string()))
        } else {
            Err(format!("invalid flow target {s:?}"))
        }
    }
}

impl Serialize for FlowTarget {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FlowTarget {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        String::deserialize(deserializer)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

pub fn is_qnum(s: &str) -> bool {
    s.len() > 1 && s.starts_with('Q') && s[1..].bytes().all(|b| b.is_ascii_digit())
}

/// Answer-conditioned edge label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Selector {
    #[serde(rename = "YES")]
    Yes,
    #[serde(rename = "NO")]
    No,
    #[serde(rename = "ANY")]
    Any,
}

impl Selector {
    pub fn as_str(self) -> &'static str {
        match self {
            Selector::Yes => "YES",
            Selector::No => "NO",
            Selector::Any => "ANY",
        }
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flow {
    #[serde(rename = "YES", default, skip_serializing_if = "Option::is_none")]
    pub yes: Option<FlowTarget>,
    #[serde(rename = "NO", default, skip_serializing_if = "Option::is_none")]
    pub no: Option<FlowTarget>,
    #[serde(rename = "ANY", default, skip_serializing_if = "Option::is_none")]
    pub any: Option<FlowTarget>,
}

impl Flow {
    pub fn edge(&self, selector: Selector) -> Option<&FlowTarget> {
        match selector {
            Selector::Yes => self.yes.as_ref(),
            Selector::No => self.no.as_ref(),
            Selector::Any => self.any.as_ref(),
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = (Selector, &FlowTarget)> {
        [
            (Selector::Yes, self.yes.as_ref()),
            (Selector::No, self.no.as_ref()),
            (Selector::Any, self.any.as_ref()),
        ]
        .into_iter()
        .filter_map(|(s, t)| t.map(|t| (s, t)))
    }
}

/// When a clause binding fires.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum BindingMatcher {
    Yes,
    No,
    /// Any answer at all (INFO and MTPC).
    Answered,
    /// An MTPC selection that includes this option.
    Option(String),
}

impl BindingMatcher {
    pub fn compatible_with(&self, qtype: QType) -> bool {
        match self {
            BindingMatcher::Yes | BindingMatcher::No => qtype == QType::Bool,
            BindingMatcher::Answered => matches!(qtype, QType::Info | QType::Mtpc),
            BindingMatcher::Option(_) => qtype == QType::Mtpc,
        }
    }
}

impl fmt::Display for BindingMatcher {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BindingMatcher::Yes => f.write_str("YES"),
            BindingMatcher::No => f.write_str("NO"),
            BindingMatcher::Answered => f.write_str("ANSWERED"),
            BindingMatcher::Option(o) => write!(f, "option {o:?}"),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MatcherRepr {
    Keyword(String),
    Option { option: String },
}

impl Serialize for BindingMatcher {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let repr = match self {
            BindingMatcher::Yes => MatcherRepr::Keyword("YES".into()),
            BindingMatcher::No => MatcherRepr::Keyword("NO".into()),
            BindingMatcher::Answered => MatcherRepr::Keyword("ANSWERED".into()),
            BindingMatcher::Option(o) => MatcherRepr::Option { option: o.clone() },
        };
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BindingMatcher {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match MatcherRepr::deserialize(deserializer)? {
            MatcherRepr::Keyword(k) => match k.as_str() {
                "YES" => Ok(BindingMatcher::Yes),
                "NO" => Ok(BindingMatcher::No),
                "ANSWERED" => Ok(BindingMatcher::Answered),
                other => Err(serde::de::Error::custom(format!(
                    "unknown matcher {other:?}, expected YES, NO, ANSWERED or {{\"option\": ...}}"
                ))),
            },
            MatcherRepr::Option { option } => Ok(BindingMatcher::Option(option)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClauseBinding {
    pub on: BindingMatcher,
    pub clauses: Vec<String>,
}

/// A BOOL question whose answer sets a named condition fact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactBinding {
    pub name: String,
    /// Fact value when the answer is YES; NO yields the negation.
    #[serde(default = "yes_default")]
    pub yes: bool,
}

fn yes_default() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Question {
    pub qnum: String,
    pub section: String,
    pub text: String,
    pub qtype: QType,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placeholder: Option<String>,
    pub flow: Flow,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub clause_bindings: Vec<ClauseBinding>,
    /// Bookkeeping only; never interpreted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub referred: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fact: Option<FactBinding>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionInfo {
    pub name: String,
    /// Question count the complete bank is expected to hold.
    pub expected: usize,
}

/// Bank file contents before structural validation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BankDocument {
    pub version: String,
    pub entry: String,
    #[serde(default)]
    pub sections: BTreeMap<String, SectionInfo>,
    pub questions: Vec<Question>,
}

impl BankDocument {
    pub fn parse(source: &[u8]) -> Result<Self, EngineError> {
        Ok(json::from_slice(source)?)
    }
}

/// Structural checks over a bank document. Error-severity findings make the bank unloadable.
pub fn lint_bank(doc: &BankDocument) -> Vec<LintIssue> {
    let mut issues = Vec::new();
    let mut index: HashMap<&str, &Question> = HashMap::new();

    for q in &doc.questions {
        if !is_qnum(&q.qnum) {
            issues.push(LintIssue::error(
                "invalid-qnum",
                &q.qnum,
                "question numbers look like Q1, Q166",
            ));
        }
        if index.insert(&q.qnum, q).is_some() {
            issues.push(LintIssue::error(
                "duplicate-qnum",
                &q.qnum,
                "question number used more than once",
            ));
        }
    }

    if !index.contains_key(doc.entry.as_str()) {
        issues.push(LintIssue::error(
            "missing-entry",
            &doc.entry,
            format!("entry question {} is not in the bank", doc.entry),
        ));
    }

    for letter in doc.sections.keys() {
        if letter.len() != 1 || !SECTION_LETTERS.contains(letter.as_str()) {
            issues.push(LintIssue::error(
                "unknown-section",
                letter,
                "sections are lettered A to J",
            ));
        }
    }

    for q in &doc.questions {
        check_question(q, doc, &mut issues);
    }

    for q in &doc.questions {
        for (sel, target) in q.flow.edges() {
            if let FlowTarget::Question(t) = target {
                if !index.contains_key(t.as_str()) {
                    issues.push(LintIssue::error(
                        "dangling-edge",
                        &q.qnum,
                        format!("dangling flow target {t} from {}/{sel}", q.qnum),
                    ));
                }
            }
        }
    }

    if index.contains_key(doc.entry.as_str()) {
        let (reachable, cycles) = walk(&doc.entry, &index);
        for cycle in cycles {
            issues.push(LintIssue::error(
                "cycle",
                &cycle[0],
                format!("flow cycle {}", cycle.join(" -> ")),
            ));
        }
        for q in &doc.questions {
            if !reachable.contains(q.qnum.as_str()) {
                issues.push(LintIssue::error(
                    "unreachable",
                    &q.qnum,
                    format!("{} cannot be reached from entry {}", q.qnum, doc.entry),
                ));
            }
        }
    }

    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for q in &doc.questions {
        *counts.entry(q.section.as_str()).or_default() += 1;
    }
    for (letter, info) in &doc.sections {
        let actual = counts.get(letter.as_str()).copied().unwrap_or(0);
        if actual != info.expected {
            issues.push(LintIssue::note(
                "section-count",
                letter,
                format!(
                    "section {letter} ({}) holds {actual} of {} questions",
                    info.name, info.expected
                ),
            ));
        }
    }

    issues
}

fn check_question(q: &Question, doc: &BankDocument, issues: &mut Vec<LintIssue>) {
    let qn = q.qnum.as_str();
    if !doc.sections.is_empty() && !doc.sections.contains_key(&q.section) {
        issues.push(LintIssue::error(
            "unknown-section",
            qn,
            format!("section {:?} is not declared", q.section),
        ));
    }
    if q.text.trim().is_empty() {
        issues.push(LintIssue::error("empty-text", qn, "question text is empty"));
    }

    let arity_ok = match q.qtype {
        QType::Bool => q.flow.yes.is_some() && q.flow.no.is_some() && q.flow.any.is_none(),
        QType::Info | QType::Mtpc => q.flow.any.is_some() && q.flow.yes.is_none() && q.flow.no.is_none(),
    };
    if !arity_ok {
        let present: Vec<&str> = q.flow.edges().map(|(s, _)| s.as_str()).collect();
        let expected = match q.qtype {
            QType::Bool => "exactly YES and NO",
            _ => "exactly one ANY",
        };
        issues.push(LintIssue::error(
            "edge-arity",
            qn,
            format!(
                "{} question {qn} needs {expected} edges, has [{}]",
                q.qtype,
                present.join(", ")
            ),
        ));
    }

    match (q.qtype, &q.placeholder) {
        (QType::Bool, Some(_)) => issues.push(LintIssue::error(
            "placeholder-rule",
            qn,
            "BOOL questions do not capture a placeholder",
        )),
        (QType::Info | QType::Mtpc, None) => issues.push(LintIssue::error(
            "placeholder-rule",
            qn,
            format!("{} questions must declare a placeholder", q.qtype),
        )),
        (_, Some(name)) if !is_placeholder_name(name) => issues.push(LintIssue::error(
            "placeholder-rule",
            qn,
            format!("invalid placeholder name {name:?}"),
        )),
        _ => {}
    }

    match q.qtype {
        QType::Mtpc => {
            if q.options.is_empty() {
                issues.push(LintIssue::error(
                    "options",
                    qn,
                    "MTPC questions need at least one option",
                ));
            }
            let distinct: BTreeSet<&String> = q.options.iter().collect();
            if distinct.len() != q.options.len() {
                issues.push(LintIssue::error("options", qn, "MTPC options must be distinct"));
            }
            if q.options
                .iter()
                .any(|o| o.trim().is_empty() || crate::library::placeholder::contains_placeholder_like(o))
            {
                issues.push(LintIssue::error(
                    "options",
                    qn,
                    "MTPC options must be non-empty plain text",
                ));
            }
        }
        _ if !q.options.is_empty() => issues.push(LintIssue::error("options", qn, "only MTPC questions carry options")),
        _ => {}
    }

    for b in &q.clause_bindings {
        if !b.on.compatible_with(q.qtype) {
            issues.push(LintIssue::error(
                "binding-matcher",
                qn,
                format!("matcher {} cannot fire for a {} question", b.on, q.qtype),
            ));
        }
        if let BindingMatcher::Option(o) = &b.on {
            if !q.options.contains(o) {
                issues.push(LintIssue::error(
                    "binding-matcher",
                    qn,
                    format!("matcher option {o:?} is not one of the question's options"),
                ));
            }
        }
        if b.clauses.is_empty() {
            issues.push(LintIssue::error("binding-matcher", qn, "binding lists no clauses"));
        }
    }

    if q.fact.is_some() && q.qtype != QType::Bool {
        issues.push(LintIssue::error(
            "fact-binding",
            qn,
            "only BOOL questions can set a condition fact",
        ));
    }
}

/// Depth-first walk from `entry`. Returns the reachable set and every cycle found,
/// each as the qnum sequence closing back on its first element.
fn walk<'a>(entry: &'a str, index: &HashMap<&'a str, &'a Question>) -> (BTreeSet<&'a str>, Vec<Vec<String>>) {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Open,
        Done,
    }
    let mut marks: HashMap<&str, Mark> = HashMap::new();
    let mut cycles = Vec::new();
    // Explicit stack of (node, next edge index) plus the current path.
    let mut stack: Vec<(&str, usize)> = vec![(entry, 0)];
    let mut path: Vec<&str> = vec![entry];
    marks.insert(entry, Mark::Open);

    while let Some((node, edge_idx)) = stack.last_mut() {
        let targets: Vec<&str> = index
            .get(node)
            .map(|q| {
                q.flow
                    .edges()
                    .filter_map(|(_, t)| match t {
                        FlowTarget::Question(n) => Some(n.as_str()),
                        FlowTarget::End => None,
                    })
                    .collect()
            })
            .unwrap_or_default();
        if *edge_idx >= targets.len() {
            marks.insert(node, Mark::Done);
            stack.pop();
            path.pop();
            continue;
        }
        let next = targets[*edge_idx];
        *edge_idx += 1;
        let Some((&key, _)) = index.get_key_value(next) else {
            continue;
        };
        match marks.get(key) {
            Some(Mark::Open) => {
                let start = path.iter().position(|&p| p == key).unwrap_or(0);
                let mut cycle: Vec<String> = path[start..].iter().map(|s| s.to_string()).collect();
                cycle.push(key.to_string());
                cycles.push(cycle);
            }
            Some(Mark::Done) => {}
            None => {
                marks.insert(key, Mark::Open);
                stack.push((key, 0));
                path.push(key);
            }
        }
    }
    (marks.into_keys().collect(), cycles)
}

/// A validated, immutable question bank.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuestionBank {
    doc: BankDocument,
    index: BTreeMap<String, usize>,
}

impl QuestionBank {
    pub fn from_document(doc: BankDocument) -> Result<Self, EngineError> {
        let errors: Vec<LintIssue> = lint_bank(&doc)
            .into_iter()
            .filter(|i| i.severity == Severity::Error)
            .collect();
        if !errors.is_empty() {
            return Err(EngineError::InvalidBank(errors));
        }
        let index = doc
            .questions
            .iter()
            .enumerate()
            .map(|(i, q)| (q.qnum.clone(), i))
            .collect();
        Ok(Self { doc, index })
    }

    pub fn version(&self) -> &str {
        &self.doc.version
    }

    pub fn entry(&self) -> &str {
        &self.doc.entry
    }

    pub fn sections(&self) -> &BTreeMap<String, SectionInfo> {
        &self.doc.sections
    }

    pub fn document(&self) -> &BankDocument {
        &self.doc
    }

    pub fn get(&self, qnum: &str) -> Option<&Question> {
        self.index.get(qnum).map(|&i| &self.doc.questions[i])
    }

    pub fn question(&self, qnum: &str) -> Result<&Question, EngineError> {
        self.get(qnum)
            .ok_or_else(|| EngineError::UnknownQuestion(qnum.to_string()))
    }

    /// Questions in document order.
    pub fn questions(&self) -> impl Iterator<Item = &Question> {
        self.doc.questions.iter()
    }

    pub fn len(&self) -> usize {
        self.doc.questions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.doc.questions.is_empty()
    }

    /// Names of every condition fact some question sets.
    pub fn fact_names(&self) -> BTreeSet<&str> {
        self.questions()
            .filter_map(|q| q.fact.as_ref().map(|f| f.name.as_str()))
            .collect()
    }

    /// The question that captures `placeholder`, if any.
    pub fn placeholder_owner(&self, placeholder: &str) -> Option<&Question> {
        self.questions().find(|q| q.placeholder.as_deref() == Some(placeholder))
    }

    pub fn section_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for q in self.questions() {
            *counts.entry(q.section.clone()).or_default() += 1;
        }
        counts
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.doc).expect("bank serializes")
    }
}

/// Parses and validates a bank document.
pub fn load_bank(source: &[u8]) -> Result<QuestionBank, EngineError> {
    QuestionBank::from_document(BankDocument::parse(source)?)
}
