//! Workbench backend. The loaded log is immutable; the model cache holds one
//! cell per parameter tuple, so each tuple is discovered at most once and
//! repeated queries return the same bytes.

use std::collections::HashMap;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex, OnceLock};

use axum::extract::{Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use hptree::discovery::{DiscoveryConfig, Mode};
use hptree::export::{json, node_frequencies};
use hptree::tree::Depth;
use hptree::{HierLog, Tree};
use serde::Deserialize;

use crate::pipeline::{model, Window};

const INDEX: &str = include_str!("../assets/index.html");
const APP: &str = include_str!("../assets/app.js");
const STYLE: &str = include_str!("../assets/style.css");

/// `paths` by bit pattern, so the key is hashable.
type Key = (u64, usize, Depth);

struct Model {
    tree: Tree,
    json: String,
}

type Cell = Arc<OnceLock<Result<Arc<Model>, String>>>;

pub struct AppState {
    log: HierLog,
    mode: Mode,
    cache: Mutex<HashMap<Key, Cell>>,
}

impl AppState {
    pub fn new(log: HierLog, mode: Mode) -> Self {
        AppState {
            log,
            mode,
            cache: Mutex::new(HashMap::new()),
        }
    }

    fn cell(&self, key: Key) -> Cell {
        let mut cache = self.cache.lock().expect("cache lock");
        cache.entry(key).or_default().clone()
    }

    /// Number of distinct parameter tuples discovered so far.
    pub fn cached(&self) -> usize {
        self.cache.lock().expect("cache lock").len()
    }
}

#[derive(Debug, Default, Deserialize)]
pub struct ModelQuery {
    paths: Option<String>,
    min_depth: Option<String>,
    max_depth: Option<String>,
    q: Option<String>,
}

fn parse_query(q: &ModelQuery) -> Result<Key, String> {
    let paths = match q.paths.as_deref() {
        None | Some("") => 1.0,
        Some(s) => s.parse::<f64>().map_err(|_| format!("paths: not a number: {s:?}"))?,
    };
    if !(0.0..=1.0).contains(&paths) {
        return Err(format!("paths must lie in [0, 1], got {paths}"));
    }
    let min_depth = match q.min_depth.as_deref() {
        None | Some("") => 0,
        Some(s) => s
            .parse()
            .map_err(|_| format!("min_depth: not a natural number: {s:?}"))?,
    };
    let max_depth = match q.max_depth.as_deref() {
        None | Some("") => Depth::Infinite,
        Some(s) => s.parse().map_err(|_| format!("max_depth: not a depth: {s:?}"))?,
    };
    Window { min_depth, max_depth }.check().map_err(|e| e.to_string())?;
    // -0.0 and 0.0 must share a cell
    Ok(((paths + 0.0).to_bits(), min_depth, max_depth))
}

async fn lookup(state: Arc<AppState>, key: Key) -> Result<Arc<Model>, Response> {
    let cell = state.cell(key);
    let result = tokio::task::spawn_blocking(move || {
        cell.get_or_init(|| {
            let (paths, min_depth, max_depth) = key;
            let cfg = DiscoveryConfig::new(state.mode, f64::from_bits(paths));
            let tree = model(&state.log, &cfg, Window { min_depth, max_depth }).map_err(|e| e.to_string())?;
            let v = json::to_json_annotated(&tree, &node_frequencies(&tree, &state.log));
            let json = serde_json::to_string(&v).expect("JSON values serialize");
            Ok(Arc::new(Model { tree, json }))
        })
        .clone()
    })
    .await
    .map_err(|e| (StatusCode::INTERNAL_SERVER_ERROR, e.to_string()).into_response())?;
    result.map_err(|e| (StatusCode::UNPROCESSABLE_ENTITY, e).into_response())
}

fn json_response(body: String) -> Response {
    ([(header::CONTENT_TYPE, "application/json")], body).into_response()
}

async fn api_model(State(state): State<Arc<AppState>>, Query(q): Query<ModelQuery>) -> Response {
    let key = match parse_query(&q) {
        Ok(k) => k,
        Err(msg) => return (StatusCode::BAD_REQUEST, msg).into_response(),
    };
    match lookup(state, key).await {
        Ok(m) => json_response(m.json.clone()),
        Err(r) => r,
    }
}

async fn api_search(State(state): State<Arc<AppState>>, Query(q): Query<ModelQuery>) -> Response {
    let key = match parse_query(&q) {
        Ok(k) => k,
        Err(msg) => return (StatusCode::BAD_REQUEST, msg).into_response(),
    };
    match lookup(state, key).await {
        Ok(m) => {
            let ids: Vec<String> = m
                .tree
                .search(q.q.as_deref().unwrap_or(""))
                .iter()
                .map(|id| id.to_string())
                .collect();
            json_response(serde_json::to_string(&ids).expect("strings serialize"))
        }
        Err(r) => r,
    }
}

async fn api_stats(State(state): State<Arc<AppState>>) -> Response {
    json_response(serde_json::to_string(&state.log.stats()).expect("stats serialize"))
}

fn asset(mime: &'static str, body: &'static str) -> Response {
    ([(header::CONTENT_TYPE, mime)], body).into_response()
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/", get(|| async { asset("text/html; charset=utf-8", INDEX) }))
        .route(
            "/app.js",
            get(|| async { asset("text/javascript; charset=utf-8", APP) }),
        )
        .route("/style.css", get(|| async { asset("text/css; charset=utf-8", STYLE) }))
        .route("/api/model", get(api_model))
        .route("/api/search", get(api_search))
        .route("/api/stats", get(api_stats))
        .with_state(state)
}

pub async fn serve(state: Arc<AppState>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("workbench listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(state)).await
}
