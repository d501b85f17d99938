//! HTTP sessions for interactive play. The client is the evader; each move
//! request plays the evader's turn and the pursuer's reply.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

use crate::engine::{new_game, Actor, GameError, GameState, Phase};
use crate::geometry::Point;
use crate::io::{parse_workspace, IoError};
use crate::motion::Pose;
use crate::policy::EvaderPolicy;
use crate::strategy::DecisionCase;
use crate::trace::{write_jsonl, TraceRecord};

pub const DEFAULT_ADDR: &str = "127.0.0.1:8497";
pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(3600);
/// Trace records included in each state view.
pub const EVENT_TAIL: usize = 20;

struct Session {
    game: Mutex<GameState>,
    last_used: Mutex<Instant>,
}

impl Session {
    fn touch(&self) {
        *self.last_used.lock().unwrap() = Instant::now();
    }
}

/// In-memory session table.
#[derive(Clone)]
pub struct Sessions {
    inner: Arc<RwLock<HashMap<String, Arc<Session>>>>,
    idle_timeout: Duration,
}

impl Default for Sessions {
    fn default() -> Self {
        Self::new(DEFAULT_IDLE_TIMEOUT)
    }
}

impl Sessions {
    pub fn new(idle_timeout: Duration) -> Self {
        Self { inner: Arc::default(), idle_timeout }
    }

    pub fn len(&self) -> usize {
        self.inner.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn insert(&self, game: GameState) -> String {
        let mut map = self.inner.write().unwrap();
        let id = loop {
            let id = format!("{:032x}", rand::random::<u128>());
            if !map.contains_key(&id) {
                break id;
            }
        };
        map.insert(id.clone(), Arc::new(Session { game: Mutex::new(game), last_used: Mutex::new(Instant::now()) }));
        id
    }

    fn get(&self, id: &str) -> Option<Arc<Session>> {
        let s = self.inner.read().unwrap().get(id).cloned()?;
        s.touch();
        Some(s)
    }

    /// Drops sessions idle for longer than the timeout as of `now`.
    pub fn evict_idle(&self, now: Instant) -> usize {
        let mut map = self.inner.write().unwrap();
        let before = map.len();
        map.retain(|_, s| now.saturating_duration_since(*s.last_used.lock().unwrap()) <= self.idle_timeout);
        before - map.len()
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreateSession {
    pub workspace: serde_json::Value,
    pub pursuer_start: [f64; 3],
    pub evader_start: [f64; 2],
    #[serde(default = "one")]
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MoveRequest {
    pub target: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseView {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointView {
    pub x: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuardView {
    pub a: [f64; 2],
    pub b: [f64; 2],
    /// Unit normal into the evader's side.
    pub normal: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateView {
    pub session_id: String,
    pub phase: Phase,
    /// Half-turns played.
    pub step: u64,
    pub pursuer: PoseView,
    pub evader: PointView,
    pub guard: Option<GuardView>,
    pub capture_radius: f64,
    pub move_radius: f64,
    pub q: Vec<[f64; 2]>,
    pub w: Vec<[f64; 2]>,
    pub captured: bool,
    pub captured_by: Option<Actor>,
    pub last_case: Option<DecisionCase>,
    pub events: Vec<TraceRecord>,
}

impl StateView {
    pub fn of(session_id: &str, g: &GameState) -> Self {
        let tail = g.event_log.len().saturating_sub(EVENT_TAIL);
        Self {
            session_id: session_id.to_string(),
            phase: g.phase,
            step: g.step,
            pursuer: PoseView { x: g.pursuer.x, y: g.pursuer.y, theta: g.pursuer.theta },
            evader: PointView { x: g.evader.x, y: g.evader.y },
            guard: g.guard.map(|gl| GuardView {
                a: gl.chord.a.into(),
                b: gl.chord.b.into(),
                normal: gl.evader_normal.into(),
            }),
            capture_radius: g.constants.r_capture,
            move_radius: g.epsilon,
            q: g.q.vertices().iter().map(|&v| v.into()).collect(),
            w: g.w.vertices().iter().map(|&v| v.into()).collect(),
            captured: g.is_captured(),
            captured_by: g.stats.captured_by,
            last_case: g.stats.last_case,
            events: g.event_log[tail..].to_vec(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ErrorBody {
    error: &'static str,
    message: String,
}

fn reject(status: StatusCode, error: &'static str, message: impl ToString) -> Response {
    (status, Json(ErrorBody { error, message: message.to_string() })).into_response()
}

fn game_error_reason(e: &GameError) -> &'static str {
    match e {
        GameError::EmptyWorkspace => "EmptyWorkspace",
        GameError::StartInCollision { .. } => "StartInCollision",
        GameError::StartOutside { .. } => "StartOutside",
        GameError::InvalidEpsilon(_) => "InvalidEpsilon",
        GameError::IllegalMove(_) => "IllegalMove",
        GameError::GameOver => "GameOver",
        _ => "InvalidGame",
    }
}

async fn create(State(sessions): State<Sessions>, body: Bytes) -> Response {
    let req: CreateSession = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return reject(StatusCode::UNPROCESSABLE_ENTITY, "ParseError", e),
    };
    let workspace = match parse_workspace(req.workspace.to_string().as_bytes()) {
        Ok(w) => w,
        Err(e @ IoError::NotConvex { .. }) => return reject(StatusCode::UNPROCESSABLE_ENTITY, "NotConvex", e),
        Err(e) => return reject(StatusCode::UNPROCESSABLE_ENTITY, "InvalidWorkspace", e),
    };
    let [px, py, pt] = req.pursuer_start;
    let [ex, ey] = req.evader_start;
    let game = match new_game(
        workspace,
        Pose::new(px, py, pt),
        Point::new(ex, ey),
        EvaderPolicy::external(),
        req.epsilon,
        req.seed,
    ) {
        Ok(g) => g,
        Err(e) => return reject(StatusCode::UNPROCESSABLE_ENTITY, game_error_reason(&e), e),
    };
    let view_game = game.clone();
    let id = sessions.insert(game);
    log::info!("session {id} created");
    (StatusCode::CREATED, Json(StateView::of(&id, &view_game))).into_response()
}

async fn play(State(sessions): State<Sessions>, Path(id): Path<String>, body: Bytes) -> Response {
    let Some(session) = sessions.get(&id) else {
        return reject(StatusCode::NOT_FOUND, "UnknownSession", id);
    };
    let req: MoveRequest = match serde_json::from_slice(&body) {
        Ok(r) => r,
        Err(e) => return reject(StatusCode::UNPROCESSABLE_ENTITY, "ParseError", e),
    };
    let mut game = session.game.lock().unwrap();
    if game.is_captured() {
        return reject(StatusCode::CONFLICT, "GameOver", "session already captured");
    }
    let target = Point::from(req.target);
    if let Err(e) = game.validate_evader_move(target) {
        return reject(StatusCode::UNPROCESSABLE_ENTITY, game_error_reason(&e), e);
    }
    let backup = game.clone();
    let result = game.evader_turn(target).and_then(|()| {
        if !game.is_captured() {
            game.pursuer_turn()?;
        }
        Ok(())
    });
    if let Err(e) = result {
        *game = backup;
        log::error!("session {id}: {e}");
        return reject(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e);
    }
    (StatusCode::OK, Json(StateView::of(&id, &game))).into_response()
}

async fn state(State(sessions): State<Sessions>, Path(id): Path<String>) -> Response {
    let Some(session) = sessions.get(&id) else {
        return reject(StatusCode::NOT_FOUND, "UnknownSession", id);
    };
    let game = session.game.lock().unwrap();
    Json(StateView::of(&id, &game)).into_response()
}

async fn trace(State(sessions): State<Sessions>, Path(id): Path<String>) -> Response {
    let Some(session) = sessions.get(&id) else {
        return reject(StatusCode::NOT_FOUND, "UnknownSession", id);
    };
    let mut body = Vec::new();
    {
        let game = session.game.lock().unwrap();
        write_jsonl(&mut body, &game.event_log).expect("writing to memory");
    }
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response()
}

pub fn router(sessions: Sessions) -> Router {
    Router::new()
        .route("/sessions", post(create))
        .route("/sessions/{id}/move", post(play))
        .route("/sessions/{id}/state", get(state))
        .route("/sessions/{id}/trace", get(trace))
        .layer(CorsLayer::permissive())
        .with_state(sessions)
}

/// Serves until the process is stopped, evicting idle sessions periodically.
pub async fn serve(addr: SocketAddr, idle_timeout: Duration) -> std::io::Result<()> {
    let sessions = Sessions::new(idle_timeout);
    let sweeper = sessions.clone();
    let period = (idle_timeout / 4).clamp(Duration::from_secs(1), Duration::from_secs(60));
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(period);
        loop {
            tick.tick().await;
            let n = sweeper.evict_idle(Instant::now());
            if n > 0 {
                log::info!("evicted {n} idle sessions");
            }
        }
    });
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(sessions)).await
}
