use std::sync::Arc;

use axum::extract::{FromRequest, FromRequestParts, Path, State};
use axum::http::header::AUTHORIZATION;
use axum::http::request::Parts;
use axum::http::StatusCode;
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use watson_core::dialogue::{Answer, Engine, Prompt, Session, SessionView, State as DialogueState};
use watson_core::domain::DomainDoc;
use watson_core::precedent::{
    ErrorSummaryRow, Outcome, Precedent, PrecedentFilter, PrecedentId, PrecedentStore, ProgressWindow,
    SimilarPrecedents,
};
use watson_core::{RawVector, SolutionId};

use crate::error::{ApiError, ApiResult};
use crate::state::{Account, AppState, SessionSlot};

type Shared = Arc<AppState>;

/// JSON body whose rejections map to 400.
#[derive(FromRequest)]
#[from_request(via(axum::Json), rejection(ApiError))]
pub struct Body<T>(pub T);

/// Query string whose rejections map to 400.
#[derive(FromRequestParts)]
#[from_request(via(axum::extract::Query), rejection(ApiError))]
pub struct Query<T>(pub T);

/// The authenticated caller.
pub struct Caller(pub Account);

impl FromRequestParts<Shared> for Caller {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &Shared) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(AUTHORIZATION)
            .and_then(|h| h.to_str().ok())
            .and_then(|h| h.strip_prefix("Bearer "))
            .ok_or(ApiError::Unauthorized)?;
        state
            .authenticate(token.trim())
            .cloned()
            .map(Caller)
            .ok_or(ApiError::Unauthorized)
    }
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/domains", post(create_domain))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/question", get(get_question))
        .route("/sessions/{id}/answer", post(post_answer))
        .route("/sessions/{id}/decision", post(post_decision))
        .route("/sessions/{id}/finalize", post(post_finalize))
        .route("/precedents/{id}/outcome", post(post_outcome))
        .route("/precedents/{id}/error-explanation", put(put_error_explanation))
        .route("/users/{id}/errors", get(get_errors))
        .route("/users/{id}/similar", get(get_similar))
        .route("/users/{id}/stats", get(get_stats))
        .with_state(state)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DomainSummary {
    pub id: String,
    pub parameters: usize,
    pub solutions: usize,
    pub antisyndromes: usize,
}

async fn create_domain(
    State(state): State<Shared>,
    Caller(caller): Caller,
    raw: axum::body::Bytes,
) -> ApiResult<(StatusCode, Json<DomainSummary>)> {
    // permission first, so non-operators learn nothing from parse errors
    if !caller.operator {
        return Err(ApiError::Forbidden);
    }
    let doc: DomainDoc<f64> = serde_json::from_slice(&raw).map_err(|e| ApiError::BadRequest(e.to_string()))?;
    let engine = blocking(move || state.add_domain(&doc)).await?;
    let d = engine.domain();
    let summary = DomainSummary {
        id: d.id().to_owned(),
        parameters: d.schema().dim(),
        solutions: d.schema().solutions().len(),
        antisyndromes: d.antisyndrome_count(),
    };
    Ok((StatusCode::CREATED, Json(summary)))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub domain: String,
    pub decision: SolutionId,
    pub evidence: RawVector<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

/// Session view together with what the user should do next.
#[derive(Debug, Serialize, Deserialize)]
pub struct SessionResponse {
    pub session: SessionView<f64>,
    pub prompt: Option<Prompt<f64>>,
}

fn prompt_of(s: &Session<f64>) -> Option<Prompt<f64>> {
    match s.state() {
        DialogueState::AwaitAnswer => s.pending().cloned().map(|question| Prompt::Question { question }),
        DialogueState::Finalize => Some(Prompt::Finalize),
        _ => None,
    }
}

fn respond(state: &AppState, engine: &Engine<f64>, s: &Session<f64>) -> ApiResult<SessionResponse> {
    let body = SessionResponse {
        session: s.view(engine.domain().schema()),
        prompt: prompt_of(s),
    };
    state.guard(s, engine, &body)?;
    Ok(body)
}

async fn blocking<R: Send + 'static>(f: impl FnOnce() -> ApiResult<R> + Send + 'static) -> ApiResult<R> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(e.to_string()))?
}

async fn create_session(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Body(req): Body<CreateSession>,
) -> ApiResult<(StatusCode, Json<SessionResponse>)> {
    let engine = state.engine(&req.domain)?;
    let seed = state.session_seed(req.seed);
    let body = blocking(move || {
        let evidence = engine.domain().schema().parse_vector(&req.evidence)?;
        let id = uuid::Uuid::new_v4().to_string();
        let mut s = engine.start_session(id.clone(), caller.id.clone(), req.decision, evidence, seed)?;
        engine.next_prompt(&mut s, state.store())?;
        let body = respond(&state, &engine, &s)?;
        let slot = SessionSlot {
            owner: caller.id,
            engine,
            session: Arc::new(tokio::sync::Mutex::new(s)),
        };
        state.insert_session(id, slot);
        Ok(body)
    })
    .await?;
    Ok((StatusCode::CREATED, Json(body)))
}

async fn get_session(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(id): Path<String>,
) -> ApiResult<Json<SessionView<f64>>> {
    let slot = state.session(&caller, &id)?;
    let s = slot.session.lock().await;
    let view = s.view(slot.engine.domain().schema());
    state.guard(&s, &slot.engine, &view)?;
    Ok(Json(view))
}

async fn get_question(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(id): Path<String>,
) -> ApiResult<Json<Prompt<f64>>> {
    let slot = state.session(&caller, &id)?;
    let s = slot.session.lock().await;
    let prompt = prompt_of(&s).ok_or_else(|| ApiError::Conflict("session is closed".into()))?;
    state.guard(&s, &slot.engine, &prompt)?;
    Ok(Json(prompt))
}

/// Runs `f` on a copy of the session and commits only on success, so a
/// rejected request never changes anything. A second mutation arriving
/// while one is running gets 409.
async fn mutate<R: Send + 'static>(
    state: Shared,
    caller: Account,
    id: String,
    f: impl FnOnce(&Engine<f64>, &mut Session<f64>, &PrecedentStore<f64>) -> ApiResult<R> + Send + 'static,
) -> ApiResult<(R, SessionResponse)> {
    let slot = state.session(&caller, &id)?;
    let mut guard = slot
        .session
        .clone()
        .try_lock_owned()
        .map_err(|_| ApiError::Conflict(format!("session `{id}` is busy")))?;
    blocking(move || {
        let engine = &slot.engine;
        let mut trial = guard.clone();
        let out = f(engine, &mut trial, state.store())?;
        if trial.state() != DialogueState::Closed {
            engine.next_prompt(&mut trial, state.store())?;
        }
        let body = respond(&state, engine, &trial)?;
        *guard = trial;
        Ok((out, body))
    })
    .await
}

async fn post_answer(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(id): Path<String>,
    Body(answer): Body<Answer<f64>>,
) -> ApiResult<Json<SessionResponse>> {
    let (_, body) = mutate(state, caller, id, move |engine, s, store| {
        Ok(engine.submit_answer(s, answer, store)?)
    })
    .await?;
    Ok(Json(body))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecisionRequest {
    pub decision: SolutionId,
}

async fn post_decision(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(id): Path<String>,
    Body(req): Body<DecisionRequest>,
) -> ApiResult<Json<SessionResponse>> {
    let (_, body) = mutate(state, caller, id, move |engine, s, _| {
        Ok(engine.change_decision(s, req.decision)?)
    })
    .await?;
    Ok(Json(body))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinalizeRequest {
    pub prognosis: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FinalizeResponse {
    pub precedent: Precedent<f64>,
    pub session: SessionView<f64>,
}

async fn post_finalize(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(id): Path<String>,
    Body(req): Body<FinalizeRequest>,
) -> ApiResult<(StatusCode, Json<FinalizeResponse>)> {
    let (precedent, body) = mutate(state, caller, id, move |engine, s, store| {
        Ok(engine.finalize_and_record(s, &req.prognosis, store)?)
    })
    .await?;
    Ok((
        StatusCode::CREATED,
        Json(FinalizeResponse {
            precedent,
            session: body.session,
        }),
    ))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutcomeRequest {
    pub summary: String,
    pub as_prognosed: bool,
    #[serde(default)]
    pub actual: Option<SolutionId>,
    #[serde(default)]
    pub discrepancy_explanation: Option<String>,
}

async fn post_outcome(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(id): Path<String>,
    Body(req): Body<OutcomeRequest>,
) -> ApiResult<Json<Precedent<f64>>> {
    let outcome = Outcome {
        summary: req.summary,
        as_prognosed: req.as_prognosed,
        actual: req.actual,
    };
    let p = blocking(move || {
        Ok(state
            .store()
            .submit_outcome(&caller.id, &PrecedentId(id), outcome, req.discrepancy_explanation)?)
    })
    .await?;
    Ok(Json(p))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplanationRequest {
    pub text: String,
}

async fn put_error_explanation(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(id): Path<String>,
    Body(req): Body<ExplanationRequest>,
) -> ApiResult<Json<Precedent<f64>>> {
    let p = blocking(move || {
        Ok(state
            .store()
            .update_error_explanation(&caller.id, &PrecedentId(id), &req.text)?)
    })
    .await?;
    Ok(Json(p))
}

fn own(caller: &Account, user: &str) -> ApiResult<()> {
    if caller.id == user {
        Ok(())
    } else {
        Err(ApiError::Forbidden)
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(default)]
pub struct FilterQuery {
    pub decision: Option<SolutionId>,
    pub since: Option<DateTime<Utc>>,
    pub until: Option<DateTime<Utc>>,
    pub max_proximity: Option<f64>,
}

impl FilterQuery {
    fn filter(self) -> PrecedentFilter<f64> {
        PrecedentFilter {
            decision: self.decision,
            since: self.since,
            until: self.until,
            max_proximity: self.max_proximity,
        }
    }
}

async fn get_errors(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(user): Path<String>,
    Query(q): Query<FilterQuery>,
) -> ApiResult<Json<Vec<ErrorSummaryRow>>> {
    own(&caller, &user)?;
    Ok(Json(state.store().error_table(&caller.id, &user, &q.filter())?))
}

#[derive(Debug, Deserialize)]
pub struct SimilarQuery {
    pub session: String,
    #[serde(default)]
    pub limit: Option<usize>,
    #[serde(default)]
    pub decision: Option<SolutionId>,
    #[serde(default)]
    pub since: Option<DateTime<Utc>>,
    #[serde(default)]
    pub until: Option<DateTime<Utc>>,
    #[serde(default)]
    pub max_proximity: Option<f64>,
}

async fn get_similar(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(user): Path<String>,
    Query(q): Query<SimilarQuery>,
) -> ApiResult<Json<SimilarPrecedents<f64>>> {
    own(&caller, &user)?;
    let slot = state.session(&caller, &q.session)?;
    let s = slot.session.lock().await;
    let engine = &slot.engine;
    let limit = q.limit.unwrap_or(engine.config().review_limit);
    let found = state.store().query_similar(
        &caller.id,
        &user,
        engine.domain().schema(),
        s.evidence(),
        limit,
        &FilterQuery {
            decision: q.decision,
            since: q.since,
            until: q.until,
            max_proximity: q.max_proximity,
        }
        .filter(),
    )?;
    state.guard(&s, engine, &found)?;
    Ok(Json(found))
}

#[derive(Debug, Deserialize)]
pub struct StatsQuery {
    pub domain: String,
    #[serde(default = "default_window")]
    pub window: usize,
}

fn default_window() -> usize {
    10
}

async fn get_stats(
    State(state): State<Shared>,
    Caller(caller): Caller,
    Path(user): Path<String>,
    Query(q): Query<StatsQuery>,
) -> ApiResult<Json<Vec<ProgressWindow<f64>>>> {
    own(&caller, &user)?;
    Ok(Json(state.store().progress_stats(&caller.id, &user, &q.domain, q.window)?))
}
