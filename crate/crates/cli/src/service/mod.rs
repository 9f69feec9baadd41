//! Local HTTP service for human-in-the-loop episodes.
//!
//! | route | purpose |
//! |---|---|
//! | `POST /sessions` | create a session from a named or inline problem |
//! | `GET /sessions/{id}` | session descriptor |
//! | `GET /sessions/{id}/candidate` | the pending candidate (blinded) |
//! | `POST /sessions/{id}/rating` | `{"stars": 1..5}` |
//! | `POST /sessions/{id}/halt` | stop and return the log |
//! | `GET /sessions/{id}/history` | generation and interaction series |
//! | `GET /sessions/{id}/events` | server-sent events |
//!
//! Each session is guarded by its own mutex, so requests against one
//! session are applied one at a time while separate sessions run
//! independently.

mod session;

pub use session::{
    CandidatePayload, ClassPayload, HaltResponse, History, InteractionSummary, RatingResponse, ServerEvent, Session,
    SessionDescriptor, SessionStatus,
};

use std::collections::HashMap;
use std::convert::Infallible;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use anyhow::Context;
use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use elegance_core::problem::{DesignProblem, ProblemFile};
use elegance_core::EpisodeConfig;
use serde::Deserialize;
use thiserror::Error;
use tokio_stream::wrappers::BroadcastStream;
use tokio_stream::{Stream, StreamExt};

use crate::headless::read_problem;

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Conflict(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self {
            Self::NotFound(_) => StatusCode::NOT_FOUND,
            Self::Conflict(_) => StatusCode::CONFLICT,
            Self::Validation(_) => StatusCode::UNPROCESSABLE_ENTITY,
            Self::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(serde_json::json!({ "error": self.to_string() }))).into_response()
    }
}

type SharedSession = Arc<Mutex<Session>>;

#[derive(Clone, Default)]
pub struct AppState {
    problems: Arc<HashMap<String, Arc<DesignProblem>>>,
    sessions: Arc<RwLock<HashMap<String, SharedSession>>>,
    log_dir: Option<PathBuf>,
}

impl AppState {
    pub fn new(problems: Vec<DesignProblem>, log_dir: Option<PathBuf>) -> Self {
        let problems = problems
            .into_iter()
            .map(|p| (p.name().to_string(), Arc::new(p)))
            .collect();
        Self {
            problems: Arc::new(problems),
            sessions: Arc::default(),
            log_dir,
        }
    }

    pub fn problem_names(&self) -> Vec<String> {
        let mut names: Vec<_> = self.problems.keys().cloned().collect();
        names.sort();
        names
    }

    fn session(&self, id: &str) -> Result<SharedSession, ApiError> {
        self.sessions
            .read()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("unknown session `{id}`")))
    }
}

/// Loads every `*.json` problem file in `dir`, sorted by file name.
pub fn load_problem_dir(dir: &Path) -> anyhow::Result<Vec<DesignProblem>> {
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| read_problem(p)).collect()
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum ProblemRef {
    Named(String),
    Inline(ProblemFile),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub problem: ProblemRef,
    #[serde(default)]
    pub config: EpisodeConfig,
}

#[derive(Debug, Deserialize)]
pub struct RatingRequest {
    pub stars: i64,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/problems", get(list_problems))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(describe))
        .route("/sessions/{id}/candidate", get(candidate))
        .route("/sessions/{id}/rating", post(rate))
        .route("/sessions/{id}/halt", post(halt))
        .route("/sessions/{id}/history", get(history))
        .route("/sessions/{id}/events", get(events))
        .with_state(state)
}

async fn list_problems(State(state): State<AppState>) -> Json<Vec<String>> {
    Json(state.problem_names())
}

/// Runs `f` on the session off the async executor.
async fn with_session<T, F>(session: SharedSession, f: F) -> Result<T, ApiError>
where
    T: Send + 'static,
    F: FnOnce(&mut Session) -> Result<T, ApiError> + Send + 'static,
{
    tokio::task::spawn_blocking(move || {
        let mut guard = session
            .lock()
            .map_err(|_| ApiError::Internal("session poisoned".into()))?;
        f(&mut guard)
    })
    .await
    .map_err(|e| ApiError::Internal(e.to_string()))?
}

async fn create_session(
    State(state): State<AppState>,
    body: Result<Json<CreateSession>, axum::extract::rejection::JsonRejection>,
) -> Result<(StatusCode, Json<SessionDescriptor>), ApiError> {
    let Json(request) = body.map_err(|e| ApiError::Validation(e.body_text()))?;
    let problem = match request.problem {
        ProblemRef::Named(name) => state
            .problems
            .get(&name)
            .cloned()
            .ok_or_else(|| ApiError::NotFound(format!("unknown problem `{name}`")))?,
        ProblemRef::Inline(file) => {
            Arc::new(DesignProblem::from_file(file).map_err(|e| ApiError::Validation(e.to_string()))?)
        }
    };
    let id = uuid::Uuid::new_v4().simple().to_string();
    let log_path = state.log_dir.as_ref().map(|d| d.join(format!("{id}.jsonl")));
    let session = Session::new(id.clone(), problem, request.config, log_path)?;
    let shared = Arc::new(Mutex::new(session));
    state
        .sessions
        .write()
        .expect("session table poisoned")
        .insert(id, shared.clone());
    let descriptor = with_session(shared, |s| {
        s.drive()?;
        Ok(s.descriptor())
    })
    .await?;
    Ok((StatusCode::CREATED, Json(descriptor)))
}

async fn describe(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<SessionDescriptor>, ApiError> {
    let session = state.session(&id)?;
    with_session(session, |s| Ok(s.descriptor())).await.map(Json)
}

async fn candidate(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<CandidatePayload>, ApiError> {
    let session = state.session(&id)?;
    with_session(session, |s| s.candidate()).await.map(Json)
}

async fn rate(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
    body: Result<Json<RatingRequest>, axum::extract::rejection::JsonRejection>,
) -> Result<Json<RatingResponse>, ApiError> {
    let session = state.session(&id)?;
    let Json(request) = body.map_err(|e| ApiError::Validation(e.body_text()))?;
    with_session(session, move |s| s.rate(request.stars)).await.map(Json)
}

async fn halt(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<HaltResponse>, ApiError> {
    let session = state.session(&id)?;
    with_session(session, |s| s.halt()).await.map(Json)
}

async fn history(State(state): State<AppState>, UrlPath(id): UrlPath<String>) -> Result<Json<History>, ApiError> {
    let session = state.session(&id)?;
    with_session(session, |s| Ok(s.history())).await.map(Json)
}

async fn events(
    State(state): State<AppState>,
    UrlPath(id): UrlPath<String>,
) -> Result<Sse<impl Stream<Item = Result<Event, Infallible>>>, ApiError> {
    let session = state.session(&id)?;
    let rx = with_session(session, |s| Ok(s.subscribe())).await?;
    let stream = BroadcastStream::new(rx).filter_map(|msg| {
        // Lagged receivers skip ahead rather than closing the stream.
        let event = msg.ok()?;
        Event::default().event(event.name()).json_data(&event).ok().map(Ok)
    });
    Ok(Sse::new(stream).keep_alive(KeepAlive::default()))
}

/// Binds to `127.0.0.1:port` and serves until the process is stopped.
pub async fn serve(state: AppState, port: u16) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port))
        .await
        .with_context(|| format!("binding port {port}"))?;
    tracing::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}
