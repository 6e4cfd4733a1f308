//! HTTP play service: a human takes one side of a structure-biased game and a
//! registered strategy plays the other.
//!
//! Sessions live in memory. Moves on one session are serialized by its own
//! lock; reads clone the snapshot taken after the last move.

pub mod error;
pub mod session;

use std::collections::HashMap;
use std::io::Write;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::{Deserialize, Serialize};
use tower_http::cors::{Any, CorsLayer};

use structbias_core::board::Edge;
use structbias_core::record::encode_record;
use structbias_core::registry::{self, StrategyInfo};

pub use error::{ApiError, ErrorBody};
pub use session::{MoveHint, NewSession, Session, SessionView, Status, MAX_SESSION_ORDER};

pub const DEFAULT_PORT: u16 = 8642;
pub const PORT_ENV: &str = "PLAY_PORT";

#[derive(Clone, Debug, Default)]
pub struct ServiceConfig {
    /// Finished games are appended here, one record per line.
    pub records: Option<PathBuf>,
    /// Origin allowed by CORS; any origin when unset.
    pub ui_origin: Option<String>,
}

struct Slot {
    game: Mutex<Session>,
    snapshot: RwLock<Arc<SessionView>>,
}

pub struct AppState {
    sessions: RwLock<HashMap<String, Arc<Slot>>>,
    records: Option<PathBuf>,
    record_writer: Mutex<()>,
}

impl AppState {
    pub fn new(records: Option<PathBuf>) -> AppState {
        AppState {
            sessions: RwLock::new(HashMap::new()),
            records,
            record_writer: Mutex::new(()),
        }
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, ApiError> {
        self.sessions
            .read()
            .expect("session table poisoned")
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::UnknownSession(id.to_string()))
    }

    pub fn create(&self, req: &NewSession) -> Result<Arc<SessionView>, ApiError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let session = Session::create(id.clone(), req)?;
        let view = Arc::new(session.view());
        if matches!(session.status(), Status::Finished { .. }) {
            self.persist(&session);
        }
        let slot = Slot {
            game: Mutex::new(session),
            snapshot: RwLock::new(view.clone()),
        };
        self.sessions
            .write()
            .expect("session table poisoned")
            .insert(id, Arc::new(slot));
        Ok(view)
    }

    pub fn get(&self, id: &str) -> Result<Arc<SessionView>, ApiError> {
        Ok(self.slot(id)?.snapshot.read().expect("snapshot poisoned").clone())
    }

    pub fn submit(&self, id: &str, edges: &[Edge]) -> Result<Arc<SessionView>, ApiError> {
        let slot = self.slot(id)?;
        let mut game = slot.game.lock().expect("session poisoned");
        game.submit(edges)?;
        let view = Arc::new(game.view());
        *slot.snapshot.write().expect("snapshot poisoned") = view.clone();
        if matches!(game.status(), Status::Finished { .. }) {
            self.persist(&game);
        }
        Ok(view)
    }

    fn persist(&self, session: &Session) {
        let Some(path) = &self.records else { return };
        let _guard = self.record_writer.lock().expect("record writer poisoned");
        let line = encode_record(session.state()) + "\n";
        let written = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .and_then(|mut f| f.write_all(line.as_bytes()));
        if let Err(e) = written {
            eprintln!("cannot append record to {}: {e}", path.display());
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoveRequest {
    pub edges: Vec<[usize; 2]>,
}

type Reply<T> = Result<T, ApiError>;

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> Reply<T> {
    payload
        .map(|Json(t)| t)
        .map_err(|e| ApiError::InvalidRequest(e.body_text()))
}

async fn create_session(
    State(app): State<Arc<AppState>>,
    payload: Result<Json<NewSession>, JsonRejection>,
) -> Reply<(StatusCode, Json<Arc<SessionView>>)> {
    let req = body(payload)?;
    Ok((StatusCode::CREATED, Json(app.create(&req)?)))
}

async fn get_session(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> Reply<Json<Arc<SessionView>>> {
    app.get(&id).map(Json)
}

async fn submit_move(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    payload: Result<Json<MoveRequest>, JsonRejection>,
) -> Reply<Json<Arc<SessionView>>> {
    let req = body(payload)?;
    let edges = req
        .edges
        .iter()
        .map(|&[a, b]| {
            Edge::try_new(a, b).ok_or_else(|| ApiError::IllegalMove {
                reason: "invalid-edge",
                message: format!("({a},{b}) is a loop"),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    app.submit(&id, &edges).map(Json)
}

async fn list_strategies() -> Json<Vec<StrategyInfo>> {
    Json(registry::strategies())
}

pub fn router(app: Arc<AppState>, ui_origin: Option<&str>) -> Router {
    let cors = CorsLayer::new().allow_methods(Any).allow_headers(Any);
    let cors = match ui_origin.and_then(|o| HeaderValue::from_str(o).ok()) {
        Some(origin) => cors.allow_origin(origin),
        None => cors.allow_origin(Any),
    };
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/moves", post(submit_move))
        .route("/strategies", get(list_strategies))
        .layer(cors)
        .with_state(app)
}

/// `PLAY_PORT`, or the default port when unset.
pub fn port_from_env() -> Result<u16, String> {
    match std::env::var(PORT_ENV) {
        Ok(raw) => raw.parse().map_err(|_| format!("{PORT_ENV}={raw} is not a port")),
        Err(_) => Ok(DEFAULT_PORT),
    }
}

/// Serves until Ctrl-C.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let app = router(Arc::new(AppState::new(config.records)), config.ui_origin.as_deref());
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("play service listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
