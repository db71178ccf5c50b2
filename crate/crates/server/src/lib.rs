#![forbid(unsafe_code)]
//! Read-only HTTP API over a workspace loaded once at startup.
//!
//! | route            | payload                                  |
//! |------------------|------------------------------------------|
//! | `/api/corpora`   | corpus list sorted by order key          |
//! | `/api/wordcloud` | word-cloud graph (`m`, `ranking`)        |
//! | `/api/shift`     | shift report (`ref`, `comp`, `measure`, `k`, `filter`) |
//! | `/api/timeline`  | sentiment timeline                       |

use std::collections::HashMap;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};
use std::time::SystemTime;

use axum::extract::{Query, State};
use axum::http::{Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use comptext_core::{
    AnalysisError, GraphError, Measure, Ranking, ShiftError, ShiftReport, TimelinePoint, WordCloudGraph,
    Workspace, DEFAULT_TOP_K, DEFAULT_WORDS_PER_NODE,
};
use serde::{Deserialize, Serialize};
use tower_http::cors::{Any, CorsLayer};
use tower_http::services::ServeDir;

/// One row of `/api/corpora`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    pub label: String,
    pub order_key: i64,
    pub token_total: u64,
    pub sentiment_token_total: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
struct ShiftKey {
    ref_id: String,
    comp_id: String,
    measure: Measure,
    k: usize,
    filter: bool,
}

/// The loaded workspace plus a memo of computed shift reports.
#[derive(Debug)]
pub struct WorkspaceStore {
    workspace: Workspace,
    loaded_at: SystemTime,
    timeline: Vec<TimelinePoint>,
    shifts: RwLock<HashMap<ShiftKey, Arc<ShiftReport>>>,
}

impl WorkspaceStore {
    /// Fails when the corpora cannot form a timeline (shared order keys).
    pub fn new(workspace: Workspace) -> Result<Self, AnalysisError> {
        let timeline = workspace.timeline()?;
        Ok(WorkspaceStore {
            workspace,
            loaded_at: SystemTime::now(),
            timeline,
            shifts: RwLock::new(HashMap::new()),
        })
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn loaded_at(&self) -> SystemTime {
        self.loaded_at
    }

    pub fn corpora(&self) -> Vec<CorpusEntry> {
        self.workspace
            .corpora()
            .into_iter()
            .map(|r| CorpusEntry {
                id: r.id.clone(),
                label: r.label.clone(),
                order_key: r.order_key,
                token_total: r.raw.total(),
                sentiment_token_total: r.annotated.base.total(),
            })
            .collect()
    }

    pub fn timeline(&self) -> &[TimelinePoint] {
        &self.timeline
    }

    pub fn wordcloud(&self, m: usize, ranking: Ranking) -> Result<WordCloudGraph, AnalysisError> {
        self.workspace.wordcloud(m, ranking)
    }

    pub fn shift(
        &self,
        ref_id: &str,
        comp_id: &str,
        measure: Measure,
        k: usize,
        filter: bool,
    ) -> Result<Arc<ShiftReport>, AnalysisError> {
        let key = ShiftKey {
            ref_id: ref_id.to_owned(),
            comp_id: comp_id.to_owned(),
            measure,
            k,
            filter,
        };
        if let Some(hit) = self.shifts.read().expect("shift cache poisoned").get(&key) {
            return Ok(Arc::clone(hit));
        }
        let report = Arc::new(self.workspace.shift_report(ref_id, comp_id, measure, k, filter)?);
        let mut cache = self.shifts.write().expect("shift cache poisoned");
        Ok(Arc::clone(cache.entry(key).or_insert(report)))
    }

    pub fn cached_shifts(&self) -> usize {
        self.shifts.read().expect("shift cache poisoned").len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub error: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
        }
    }
}

impl From<AnalysisError> for ApiError {
    fn from(err: AnalysisError) -> Self {
        let status = match &err {
            AnalysisError::UnknownCorpus(_) => StatusCode::NOT_FOUND,
            AnalysisError::Shift(ShiftError::ZeroCutoff)
            | AnalysisError::Graph(GraphError::ZeroWordsPerNode) => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError {
            status,
            message: err.to_string(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(ErrorBody { error: self.message })).into_response()
    }
}

type Params = Query<HashMap<String, String>>;

fn positive(params: &HashMap<String, String>, name: &str, default: usize) -> Result<usize, ApiError> {
    match params.get(name) {
        None => Ok(default),
        Some(raw) => match raw.parse::<usize>() {
            Ok(v) if v >= 1 => Ok(v),
            _ => Err(ApiError::bad_request(format!(
                "`{name}` must be a positive integer, got `{raw}`"
            ))),
        },
    }
}

fn flag(params: &HashMap<String, String>, name: &str, default: bool) -> Result<bool, ApiError> {
    match params.get(name).map(String::as_str) {
        None => Ok(default),
        Some("true" | "1" | "on" | "yes") => Ok(true),
        Some("false" | "0" | "off" | "no") => Ok(false),
        Some(other) => Err(ApiError::bad_request(format!(
            "`{name}` must be a boolean, got `{other}`"
        ))),
    }
}

fn required<'a>(params: &'a HashMap<String, String>, name: &str) -> Result<&'a str, ApiError> {
    params
        .get(name)
        .map(String::as_str)
        .ok_or_else(|| ApiError::bad_request(format!("missing `{name}` parameter")))
}

async fn corpora(State(store): State<Arc<WorkspaceStore>>) -> Json<Vec<CorpusEntry>> {
    Json(store.corpora())
}

async fn wordcloud(
    State(store): State<Arc<WorkspaceStore>>,
    Query(params): Params,
) -> Result<Json<WordCloudGraph>, ApiError> {
    let m = positive(&params, "m", DEFAULT_WORDS_PER_NODE)?;
    let ranking = match params.get("ranking") {
        None => Ranking::default(),
        Some(raw) => raw.parse().map_err(ApiError::bad_request)?,
    };
    Ok(Json(store.wordcloud(m, ranking)?))
}

async fn shift(
    State(store): State<Arc<WorkspaceStore>>,
    Query(params): Params,
) -> Result<Json<ShiftReport>, ApiError> {
    let ref_id = required(&params, "ref")?;
    let comp_id = required(&params, "comp")?;
    let measure: Measure = required(&params, "measure")?
        .parse()
        .map_err(ApiError::bad_request)?;
    let k = positive(&params, "k", DEFAULT_TOP_K)?;
    let filter = flag(&params, "filter", true)?;
    let report = store.shift(ref_id, comp_id, measure, k, filter)?;
    Ok(Json(ShiftReport::clone(&report)))
}

async fn timeline(State(store): State<Arc<WorkspaceStore>>) -> Json<Vec<TimelinePoint>> {
    Json(store.timeline().to_vec())
}

/// API routes with CORS open to any origin. When `ui_dir` is set, static
/// files under it are served for every other path.
pub fn router(store: Arc<WorkspaceStore>, ui_dir: Option<PathBuf>) -> Router {
    let cors = CorsLayer::new().allow_origin(Any).allow_methods([Method::GET]);
    let api = Router::new()
        .route("/api/corpora", get(corpora))
        .route("/api/wordcloud", get(wordcloud))
        .route("/api/shift", get(shift))
        .route("/api/timeline", get(timeline))
        .with_state(store);
    let app = match ui_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    };
    app.layer(cors)
}

/// Serves until interrupted.
pub async fn serve(
    store: Arc<WorkspaceStore>,
    addr: SocketAddr,
    ui_dir: Option<PathBuf>,
) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(address = %listener.local_addr()?, corpora = store.workspace().len(), "serving workspace");
    axum::serve(listener, router(store, ui_dir))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
