//! HTTP session service for interactive play.
//!
//! `POST /sessions`, `POST /sessions/{id}/moves`, `GET /sessions/{id}` and
//! `GET /sessions`. Transcripts use the same JSON as the command line.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tower_http::cors::{Any, CorsLayer};

use crate::agents::eval_move;
use crate::arith::Element;
use crate::embedding::Report;
use crate::game::{GameState, Side};
use crate::parse::parse_element;
use crate::transcript::Transcript;

/// Default bound on the number of rounds of a session.
pub const DEFAULT_MAX_N: u32 = 4;

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub max_n: u32,
    /// Where to write all transcripts on shutdown.
    pub persist: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            max_n: DEFAULT_MAX_N,
            persist: None,
        }
    }
}

struct Session {
    created_at: u64,
    state: GameState,
}

type SessionMap = BTreeMap<String, Arc<tokio::sync::Mutex<Session>>>;

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<parking_lot::Mutex<SessionMap>>,
    next_id: Arc<AtomicU64>,
    config: Arc<ServiceConfig>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> AppState {
        AppState {
            sessions: Arc::new(parking_lot::Mutex::new(BTreeMap::new())),
            next_id: Arc::new(AtomicU64::new(1)),
            config: Arc::new(config),
        }
    }

    fn session(&self, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, ApiError> {
        self.sessions
            .lock()
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session {id}")))
    }

    /// All transcripts keyed by session id.
    pub async fn snapshot(&self) -> BTreeMap<String, Transcript> {
        let sessions: Vec<(String, Arc<tokio::sync::Mutex<Session>>)> =
            self.sessions.lock().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut out = BTreeMap::new();
        for (id, s) in sessions {
            out.insert(id, Transcript::from_state(&s.lock().await.state, None));
        }
        out
    }
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

fn bad_request(e: impl std::fmt::Display) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, e.to_string())
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(bad_request)
}

#[derive(Deserialize)]
struct CreateRequest {
    n: u32,
    w: String,
}

#[derive(Serialize)]
struct Descriptor {
    id: String,
    n: u32,
    w: Element,
    a0: Element,
    b0: Element,
}

#[derive(Deserialize)]
struct MoveRequest {
    side: Side,
    element: String,
    /// The 1-based round this move is meant for.
    #[serde(default)]
    round: Option<u32>,
}

#[derive(Serialize)]
struct MoveResponse {
    reply: Element,
    round: u32,
    #[serde(rename = "fragmentReport")]
    fragment_report: Report,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<Report>,
}

#[derive(Serialize)]
struct Listing {
    id: String,
    n: u32,
    w: Element,
    status: &'static str,
    #[serde(rename = "createdAt")]
    created_at: u64,
}

fn status_of(state: &GameState) -> &'static str {
    if state.is_finished() {
        "finished"
    } else {
        "awaiting-forall"
    }
}

async fn create_session(State(app): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateRequest = parse_body(&body)?;
    if req.n > app.config.max_n {
        return Err(bad_request(format!("n = {} exceeds the limit {}", req.n, app.config.max_n)));
    }
    let w = parse_element(&req.w).map_err(bad_request)?;
    let state = GameState::new(req.n, w).map_err(bad_request)?;
    let id = format!("s{}", app.next_id.fetch_add(1, Ordering::SeqCst));
    let desc = Descriptor {
        id: id.clone(),
        n: state.n,
        w: state.w.clone(),
        a0: Element::NonStd(state.a0.clone()),
        b0: Element::NonStd(state.b0.clone()),
    };
    let created_at = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or_default();
    app.sessions
        .lock()
        .insert(id, Arc::new(tokio::sync::Mutex::new(Session { created_at, state })));
    Ok((StatusCode::CREATED, Json(desc)).into_response())
}

async fn post_move(
    State(app): State<AppState>,
    Path(id): Path<String>,
    body: Bytes,
) -> Result<Json<MoveResponse>, ApiError> {
    let session = app.session(&id)?;
    let req: MoveRequest = parse_body(&body)?;
    let mut s = session.lock().await;
    if s.state.is_finished() {
        return Err(ApiError(StatusCode::CONFLICT, "the session is finished".into()));
    }
    let round = s.state.rounds.len() as u32 + 1;
    if let Some(r) = req.round {
        if r != round {
            return Err(ApiError(
                StatusCode::CONFLICT,
                format!("move is for round {r} but the session is at round {round}"),
            ));
        }
    }
    let element = eval_move(&s.state, &req.element).map_err(bad_request)?;
    let reply = s
        .state
        .respond(req.side, element)
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let fragment_report = s.state.rounds.last().expect("a round was played").fragment_report.clone();
    Ok(Json(MoveResponse {
        reply,
        round,
        fragment_report,
        verdict: s.state.win_check().ok(),
    }))
}

async fn get_session(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = app.session(&id)?;
    let s = session.lock().await;
    let body = Transcript::from_state(&s.state, None).to_json();
    Ok(([(header::CONTENT_TYPE, "application/json")], body).into_response())
}

async fn list_sessions(State(app): State<AppState>) -> Json<Vec<Listing>> {
    let sessions: Vec<(String, Arc<tokio::sync::Mutex<Session>>)> =
        app.sessions.lock().iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    let mut out = Vec::new();
    for (id, s) in sessions {
        let s = s.lock().await;
        out.push(Listing {
            id,
            n: s.state.n,
            w: s.state.w.clone(),
            status: status_of(&s.state),
            created_at: s.created_at,
        });
    }
    Json(out)
}

/// The service routes with CORS enabled.
pub fn router(app: AppState) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(Any)
        .allow_methods([Method::GET, Method::POST])
        .allow_headers(Any);
    Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", post(post_move))
        .layer(cors)
        .with_state(app)
}

/// Serves until interrupted, then writes transcripts if configured.
pub async fn serve(listener: tokio::net::TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    let app = AppState::new(config.clone());
    axum::serve(listener, router(app.clone()))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    if let Some(path) = &config.persist {
        let all = app.snapshot().await;
        let text = serde_json::to_string_pretty(&all).map_err(std::io::Error::other)?;
        std::fs::write(path, text + "\n")?;
    }
    Ok(())
}
