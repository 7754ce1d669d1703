//! HTTP front end: upload a workbook once, then run analyses against the
//! immutable snapshot by id.
//!
//! | route | result |
//! |---|---|
//! | `POST /api/workbooks` | `{"id","sheets","bounds"}` |
//! | `GET /api/workbooks/{id}` | cell list |
//! | `POST /api/workbooks/{id}/analyze` | report JSON |
//! | `GET /api/workbooks/{id}/diagnostics?checks=&block=` | lint report JSON |
//!
//! Report bodies are byte-identical to the command line's JSON output.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, RwLock};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use sheetlens::analysis::{analyze, Analysis, AnalysisRequest, Tool};
use sheetlens::depgraph::{build_graph, DepGraph};
use sheetlens::report::to_json;
use sheetlens::workbook::{cell_records, load_grid, load_json, Workbook};
use tower_http::services::ServeDir;

pub const DEFAULT_IDLE_TIMEOUT: Duration = Duration::from_secs(3600);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Sessions unused for this long are dropped.
    pub idle_timeout: Duration,
    /// Directory served at `/`, typically the UI bundle.
    pub static_dir: Option<PathBuf>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig { idle_timeout: DEFAULT_IDLE_TIMEOUT, static_dir: None }
    }
}

struct Session {
    workbook: Workbook,
    graph: DepGraph,
    last_used: Mutex<Instant>,
}

/// Live sessions by id. The map is the only mutable state; sessions
/// themselves are read-only once built.
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    idle_timeout: Duration,
}

impl SessionStore {
    fn new(idle_timeout: Duration) -> Self {
        SessionStore { sessions: RwLock::new(HashMap::new()), idle_timeout }
    }

    fn insert(&self, workbook: Workbook) -> String {
        let graph = build_graph(&workbook);
        let session = Arc::new(Session { workbook, graph, last_used: Mutex::new(Instant::now()) });
        let mut sessions = self.sessions.write().expect("session lock");
        sessions.retain(|_, s| !self.expired(s));
        loop {
            let id = uuid::Uuid::new_v4().simple().to_string();
            if !sessions.contains_key(&id) {
                sessions.insert(id.clone(), session);
                return id;
            }
        }
    }

    fn get(&self, id: &str) -> Option<Arc<Session>> {
        let session = self.sessions.read().expect("session lock").get(id).cloned()?;
        if self.expired(&session) {
            self.sessions.write().expect("session lock").remove(id);
            return None;
        }
        *session.last_used.lock().expect("clock lock") = Instant::now();
        Some(session)
    }

    fn expired(&self, session: &Session) -> bool {
        session.last_used.lock().expect("clock lock").elapsed() >= self.idle_timeout
    }

    pub fn len(&self) -> usize {
        self.sessions.read().expect("session lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

type AppState = Arc<SessionStore>;

pub fn router(config: ServiceConfig) -> Router {
    let state: AppState = Arc::new(SessionStore::new(config.idle_timeout));
    let api = Router::new()
        .route("/api/workbooks", post(upload))
        .route("/api/workbooks/{id}", get(get_workbook))
        .route("/api/workbooks/{id}/analyze", post(analyze_workbook))
        .route("/api/workbooks/{id}/diagnostics", get(diagnostics))
        .with_state(state);
    match config.static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}

/// Serves until the process is stopped.
pub async fn serve(addr: SocketAddr, config: ServiceConfig) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(config)).await
}

fn error(status: StatusCode, code: &str, message: impl Into<String>) -> Response {
    (status, Json(json!({"error": code, "message": message.into()}))).into_response()
}

fn not_found(id: &str) -> Response {
    error(StatusCode::NOT_FOUND, "NOT_FOUND", format!("no workbook `{id}` (unknown or expired)"))
}

async fn upload(State(store): State<AppState>, headers: HeaderMap, body: Bytes) -> Response {
    let Ok(text) = std::str::from_utf8(&body) else {
        return error(StatusCode::BAD_REQUEST, "FORMAT_ERROR", "body is not UTF-8");
    };
    let is_json = headers
        .get(header::CONTENT_TYPE)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.contains("json"));
    let loaded = if is_json { load_json(text) } else { load_grid(text) };
    let workbook = match loaded {
        Ok(wb) => wb,
        Err(e) => return error(StatusCode::BAD_REQUEST, e.code(), e.to_string()),
    };
    let sheets: Vec<String> = workbook.sheets().iter().map(|s| s.name().to_string()).collect();
    let bounds = workbook.sheets()[0].used_region().map(|r| r.display_in(workbook.default_sheet()));
    let id = store.insert(workbook);
    Json(json!({"id": id, "sheets": sheets, "bounds": bounds})).into_response()
}

async fn get_workbook(State(store): State<AppState>, Path(id): Path<String>) -> Response {
    match store.get(&id) {
        Some(session) => Json(cell_records(&session.workbook)).into_response(),
        None => not_found(&id),
    }
}

/// `depth` and `checks` may be given as JSON numbers/arrays or as text.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum Loose {
    Number(u64),
    Text(String),
    List(Vec<String>),
}

impl Loose {
    fn into_text(self) -> String {
        match self {
            Loose::Number(n) => n.to_string(),
            Loose::Text(t) => t,
            Loose::List(items) => items.join(","),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnalyzeBody {
    tool: String,
    region: Option<String>,
    block: Option<String>,
    depth: Option<Loose>,
    checks: Option<Loose>,
}

async fn analyze_workbook(State(store): State<AppState>, Path(id): Path<String>, body: Bytes) -> Response {
    let body: AnalyzeBody = match serde_json::from_slice(&body) {
        Ok(b) => b,
        Err(e) => return error(StatusCode::BAD_REQUEST, "BAD_REQUEST", format!("invalid analyze request: {e}")),
    };
    let tool = match body.tool.parse::<Tool>() {
        Ok(t) => t,
        Err(e) => return error(StatusCode::BAD_REQUEST, "BAD_REQUEST", e.to_string()),
    };
    let request = AnalysisRequest {
        tool,
        region: body.region,
        block: body.block,
        depth: body.depth.map(Loose::into_text),
        checks: body.checks.map(Loose::into_text),
    };
    run(&store, &id, &request)
}

#[derive(Debug, Deserialize)]
struct DiagnosticsQuery {
    checks: Option<String>,
    block: Option<String>,
}

async fn diagnostics(
    State(store): State<AppState>,
    Path(id): Path<String>,
    Query(query): Query<DiagnosticsQuery>,
) -> Response {
    let request = AnalysisRequest {
        block: query.block.filter(|b| !b.is_empty()),
        checks: query.checks.filter(|c| !c.is_empty()),
        ..AnalysisRequest::new(Tool::Lint)
    };
    run(&store, &id, &request)
}

fn run(store: &SessionStore, id: &str, request: &AnalysisRequest) -> Response {
    let Some(session) = store.get(id) else { return not_found(id) };
    match analyze(&session.workbook, &session.graph, request) {
        Ok(Analysis { report, cycle }) => {
            let status = if cycle { StatusCode::CONFLICT } else { StatusCode::OK };
            (status, [(header::CONTENT_TYPE, "application/json")], to_json(&report)).into_response()
        }
        Err(e) => error(StatusCode::BAD_REQUEST, "BAD_REQUEST", e.to_string()),
    }
}
