use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use policygen_core::engine::{AnswerValue, Cursor, EngineError, QType, Question, Session};
use policygen_core::evaluation::{
    evaluate_completeness, evaluate_coverage, fre_score_with, load_checklist, load_criteria, presence_from_session,
    CompletenessReport, CoverageReport, MetadataPresence, ReadabilityReport, DEFAULT_WORDS_PER_MINUTE,
};
use policygen_core::generator::{generate, render, Format, GenerateOptions, PolicyDocument};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::catalog::Catalog;
use crate::error::ApiError;
use crate::store::SessionStore;

/// Response header set on generated policies: `true` when any item is non-compliant.
pub const NON_COMPLIANT_HEADER: &str = "x-policy-non-compliant";

#[derive(Clone)]
pub struct AppState {
    inner: Arc<Inner>,
}

struct Inner {
    catalog: Catalog,
    store: SessionStore,
    locks: Mutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl AppState {
    pub fn new(catalog: Catalog, store: SessionStore) -> Self {
        Self {
            inner: Arc::new(Inner {
                catalog,
                store,
                locks: Mutex::new(HashMap::new()),
            }),
        }
    }

    pub fn catalog(&self) -> &Catalog {
        &self.inner.catalog
    }

    pub fn store(&self) -> &SessionStore {
        &self.inner.store
    }

    fn lock_for(&self, id: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.inner.locks.lock().expect("lock table poisoned");
        locks.entry(id.to_string()).or_default().clone()
    }

    fn load(&self, id: &str) -> Result<Session, ApiError> {
        Ok(self.store().restore_session(id, &self.catalog().bank)?)
    }

    /// Runs `f` on the stored session under its lock and persists the result.
    async fn update<T>(&self, id: &str, f: impl FnOnce(&mut Session) -> Result<T, ApiError>) -> Result<T, ApiError> {
        let lock = self.lock_for(id);
        let _guard = lock.lock().await;
        let mut session = self.load(id)?;
        let out = f(&mut session)?;
        self.store().save(id, &session)?;
        Ok(out)
    }

    /// Reads the stored session under its lock.
    async fn read(&self, id: &str) -> Result<Session, ApiError> {
        let lock = self.lock_for(id);
        let _guard = lock.lock().await;
        self.load(id)
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/healthz", get(healthz))
        .route("/bank", get(bank))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/question", get(current_question))
        .route("/sessions/{id}/answers", post(submit_answer))
        .route("/sessions/{id}/answers/{qnum}", put(amend_answer))
        .route("/sessions/{id}/preview", get(preview))
        .route("/sessions/{id}/generate", post(generate_policy).get(generate_policy))
        .route("/sessions/{id}/presence", get(session_presence))
        .route("/evaluate/readability", post(eval_readability))
        .route("/evaluate/completeness", post(eval_completeness))
        .route("/evaluate/coverage", post(eval_coverage))
        .fallback(|| async { ApiError::not_found("no such endpoint") })
        .with_state(state)
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    policygen_core::json::from_slice(body)
        .map_err(|e| ApiError::new("invalid_json", e.to_string()).with_detail(serde_json::json!({"path": e.path})))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionView {
    pub qnum: String,
    pub section: String,
    pub text: String,
    pub qtype: QType,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub options: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placeholder: Option<String>,
}

impl From<&Question> for QuestionView {
    fn from(q: &Question) -> Self {
        Self {
            qnum: q.qnum.clone(),
            section: q.section.clone(),
            text: q.text.clone(),
            qtype: q.qtype,
            options: q.options.clone(),
            placeholder: q.placeholder.clone(),
        }
    }
}

/// Where a session stands after a request: the next question, or completion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Progress {
    pub completed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub next: Option<QuestionView>,
}

fn progress(catalog: &Catalog, cursor: &Cursor) -> Progress {
    Progress {
        completed: cursor.is_completed(),
        next: cursor.qnum().and_then(|q| catalog.bank.get(q)).map(QuestionView::from),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CreatedSession {
    pub id: String,
    pub question: Option<QuestionView>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerView {
    pub qnum: String,
    pub section: String,
    pub value: Value,
    pub active: bool,
    pub answered_at: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SectionProgress {
    pub name: String,
    /// Active answers in this section.
    pub answered: usize,
    pub questions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionView {
    pub id: String,
    pub cursor: Cursor,
    pub completed: bool,
    /// Trail order first, then inactive answers by qnum.
    pub answers: Vec<AnswerView>,
    pub sections: BTreeMap<String, SectionProgress>,
    pub snapshot: Session,
}

fn session_view(catalog: &Catalog, id: &str, session: Session) -> SessionView {
    let bank = &catalog.bank;
    let section_of = |q: &str| bank.get(q).map(|q| q.section.clone()).unwrap_or_default();
    let mut answers: Vec<AnswerView> = session
        .active_answers()
        .map(|(q, r)| AnswerView {
            qnum: q.to_string(),
            section: section_of(q),
            value: r.value.to_json(),
            active: true,
            answered_at: r.answered_at,
        })
        .collect();
    for q in session.inactive_qnums() {
        let r = &session.answers()[q];
        answers.push(AnswerView {
            qnum: q.to_string(),
            section: section_of(q),
            value: r.value.to_json(),
            active: false,
            answered_at: r.answered_at,
        });
    }
    let counts = bank.section_counts();
    let sections = bank
        .sections()
        .iter()
        .map(|(letter, info)| {
            let answered = answers.iter().filter(|a| a.active && &a.section == letter).count();
            let sp = SectionProgress {
                name: info.name.clone(),
                answered,
                questions: counts.get(letter).copied().unwrap_or(0),
            };
            (letter.clone(), sp)
        })
        .collect();
    SessionView {
        id: id.to_string(),
        cursor: session.cursor().clone(),
        completed: session.is_completed(),
        answers,
        sections,
        snapshot: session,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BankView {
    pub version: String,
    pub entry: String,
    pub sections: BTreeMap<String, String>,
    pub questions: Vec<QuestionView>,
}

async fn healthz() -> Json<Value> {
    Json(serde_json::json!({"status": "ok"}))
}

async fn bank(State(state): State<AppState>) -> Json<BankView> {
    let bank = &state.catalog().bank;
    Json(BankView {
        version: bank.version().to_string(),
        entry: bank.entry().to_string(),
        sections: bank
            .sections()
            .iter()
            .map(|(k, v)| (k.clone(), v.name.clone()))
            .collect(),
        questions: bank.questions().map(QuestionView::from).collect(),
    })
}

async fn create_session(State(state): State<AppState>) -> Result<(StatusCode, Json<CreatedSession>), ApiError> {
    let session = Session::start(&state.catalog().bank);
    let id = state.store().persist_session(&session)?;
    tracing::info!(%id, "session created");
    let question = progress(state.catalog(), session.cursor()).next;
    Ok((StatusCode::CREATED, Json(CreatedSession { id, question })))
}

async fn get_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<SessionView>, ApiError> {
    let session = state.read(&id).await?;
    Ok(Json(session_view(state.catalog(), &id, session)))
}

async fn delete_session(State(state): State<AppState>, Path(id): Path<String>) -> Result<StatusCode, ApiError> {
    let lock = state.lock_for(&id);
    let _guard = lock.lock().await;
    state.store().delete(&id)?;
    Ok(StatusCode::NO_CONTENT)
}

async fn current_question(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<Progress>, ApiError> {
    let session = state.read(&id).await?;
    Ok(Json(progress(state.catalog(), session.cursor())))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubmitBody {
    qnum: String,
    value: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AmendBody {
    value: Value,
}

fn decode_answer(catalog: &Catalog, qnum: &str, value: &Value) -> Result<AnswerValue, ApiError> {
    let q = catalog.bank.question(qnum)?;
    Ok(AnswerValue::from_json(qnum, q.qtype, value)?)
}

async fn submit_answer(
    State(state): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<Progress>, ApiError> {
    let body: SubmitBody = parse_body(&body)?;
    let catalog = state.catalog().clone();
    let cursor = state
        .update(&id, |session| {
            match session.cursor() {
                Cursor::Completed => return Err(EngineError::SessionCompleted.into()),
                Cursor::At(at) if *at != body.qnum => {
                    return Err(EngineError::OutOfOrder {
                        expected: at.clone(),
                        found: body.qnum.clone(),
                    }
                    .into())
                }
                Cursor::At(_) => {}
            }
            let value = decode_answer(&catalog, &body.qnum, &body.value)?;
            Ok(session.submit_answer(&catalog.bank, value)?.clone())
        })
        .await?;
    Ok(Json(progress(&catalog, &cursor)))
}

async fn amend_answer(
    State(state): State<AppState>,
    Path((id, qnum)): Path<(String, String)>,
    body: Bytes,
) -> Result<Json<Progress>, ApiError> {
    let body: AmendBody = parse_body(&body)?;
    let catalog = state.catalog().clone();
    let cursor = state
        .update(&id, |session| {
            let value = decode_answer(&catalog, &qnum, &body.value)?;
            Ok(session.amend_answer(&catalog.bank, &qnum, value)?.clone())
        })
        .await?;
    Ok(Json(progress(&catalog, &cursor)))
}

async fn preview(State(state): State<AppState>, Path(id): Path<String>) -> Result<Json<PolicyDocument>, ApiError> {
    let session = state.read(&id).await?;
    let c = state.catalog();
    Ok(Json(generate(
        &c.template,
        &session,
        &c.library,
        &GenerateOptions::preview(),
    )?))
}

#[derive(Debug, Deserialize)]
struct GenerateQuery {
    format: Option<String>,
    strict: Option<bool>,
}

async fn generate_policy(
    State(state): State<AppState>,
    Path(id): Path<String>,
    Query(q): Query<GenerateQuery>,
) -> Result<Response, ApiError> {
    let format: Format = q.format.as_deref().unwrap_or("plain").parse()?;
    let session = state.read(&id).await?;
    let c = state.catalog();
    let opts = GenerateOptions {
        strict: q.strict.unwrap_or(true),
        ..GenerateOptions::default()
    };
    let doc = generate(&c.template, &session, &c.library, &opts)?;
    let mut resp = render(&doc, format).into_response();
    let headers = resp.headers_mut();
    headers.insert(header::CONTENT_TYPE, HeaderValue::from_static(format.content_type()));
    headers.insert(
        NON_COMPLIANT_HEADER,
        HeaderValue::from_static(if doc.has_non_compliant() { "true" } else { "false" }),
    );
    Ok(resp)
}

async fn session_presence(
    State(state): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<MetadataPresence>, ApiError> {
    let session = state.read(&id).await?;
    let c = state.catalog();
    Ok(Json(presence_from_session(&session, &c.bank, &c.library)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReadabilityBody {
    text: String,
    words_per_minute: Option<f64>,
}

async fn eval_readability(body: Bytes) -> Result<Json<ReadabilityReport>, ApiError> {
    let body: ReadabilityBody = parse_body(&body)?;
    let wpm = body.words_per_minute.unwrap_or(DEFAULT_WORDS_PER_MINUTE);
    if !(wpm.is_finite() && wpm > 0.0) {
        return Err(ApiError::new("invalid_input", "words_per_minute must be positive"));
    }
    Ok(Json(fre_score_with(&body.text, wpm)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompletenessBody {
    presence: MetadataPresence,
    /// Replaces the loaded criteria for this request.
    criteria: Option<Value>,
}

async fn eval_completeness(State(state): State<AppState>, body: Bytes) -> Result<Json<CompletenessReport>, ApiError> {
    let body: CompletenessBody = parse_body(&body)?;
    let c = state.catalog();
    let custom = match body.criteria {
        Some(v) => Some(load_criteria(v.to_string().as_bytes(), &c.vocabulary)?),
        None => None,
    };
    let criteria = custom.as_deref().unwrap_or(&c.criteria);
    Ok(Json(evaluate_completeness(criteria, &body.presence, &c.vocabulary)?))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoverageBody {
    presence: MetadataPresence,
    #[serde(default)]
    review_flags: BTreeSet<String>,
    checklist: Option<Value>,
}

async fn eval_coverage(State(state): State<AppState>, body: Bytes) -> Result<Json<CoverageReport>, ApiError> {
    let body: CoverageBody = parse_body(&body)?;
    let c = state.catalog();
    body.presence.validate(&c.vocabulary)?;
    let custom = match body.checklist {
        Some(v) => Some(load_checklist(v.to_string().as_bytes(), &c.vocabulary)?),
        None => None,
    };
    let checklist = custom.as_deref().unwrap_or(&c.checklist);
    Ok(Json(evaluate_coverage(checklist, &body.presence, &body.review_flags)))
}
