//! HTTP API over the extraction engine.
//!
//! The service keeps one project in memory (`GET`/`PUT /project`). Every
//! processing endpoint takes a JSON body with the document `text` and may
//! carry its own `project`, which then takes precedence over the session.

use axum::body::Bytes;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use morphtag::analysis::{diff_tags, diff_tags_checked, MatchPredicate, Tag};
use morphtag::io::{from_json, ProjectFile};
use morphtag::morphology::solutions_to_string;
use morphtag::pipeline::{match_records, Engine, EngineError, Stage};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

/// A loaded project and the engine built from it.
#[derive(Debug)]
struct Session {
    project: ProjectFile,
    engine: Engine,
}

#[derive(Clone, Debug)]
pub struct AppState {
    session: Arc<RwLock<Option<Arc<Session>>>>,
    base_dir: PathBuf,
    max_steps: Option<u64>,
}

impl AppState {
    /// `base_dir` resolves lexicon paths of projects sent over HTTP.
    pub fn new(base_dir: impl Into<PathBuf>) -> Self {
        AppState {
            session: Arc::new(RwLock::new(None)),
            base_dir: base_dir.into(),
            max_steps: None,
        }
    }

    pub fn with_max_steps(mut self, max_steps: u64) -> Self {
        self.max_steps = Some(max_steps);
        self
    }

    /// Installs `project` as the session project.
    pub fn set_project(&self, project: ProjectFile) -> Result<(), EngineError> {
        let engine = self.engine_for(&project)?;
        *self.session.write().expect("session lock poisoned") = Some(Arc::new(Session { project, engine }));
        Ok(())
    }

    fn engine_for(&self, project: &ProjectFile) -> Result<Engine, EngineError> {
        let lexicon = project
            .load_lexicon(&self.base_dir)
            .map_err(|e| EngineError::new(Stage::Load, e))?;
        let engine = Engine::new(project.clone(), lexicon)?;
        Ok(match self.max_steps {
            Some(n) => engine.with_max_steps(n),
            None => engine,
        })
    }

    fn session(&self) -> Option<Arc<Session>> {
        self.session.read().expect("session lock poisoned").clone()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    stage: Option<Stage>,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
            stage: None,
        }
    }
}

impl From<EngineError> for ApiError {
    fn from(e: EngineError) -> Self {
        let status = match e.stage {
            Stage::Load => StatusCode::BAD_REQUEST,
            _ => StatusCode::UNPROCESSABLE_ENTITY,
        };
        ApiError {
            status,
            message: e.message,
            stage: Some(e.stage),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if let Some(stage) = self.stage {
            body["stage"] = json!(stage);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    let text = std::str::from_utf8(body).map_err(|e| ApiError::bad_request(format!("body is not UTF-8: {e}")))?;
    from_json(text).map_err(|e| ApiError::bad_request(e.to_string()))
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct DocRequest {
    text: String,
    #[serde(default)]
    project: Option<ProjectFile>,
}

async fn with_engine<T: Send + 'static>(
    state: &AppState,
    project: Option<ProjectFile>,
    f: impl FnOnce(&Engine) -> ApiResult<T> + Send + 'static,
) -> ApiResult<T> {
    let engine = match project {
        Some(p) => state.engine_for(&p)?,
        None => match state.session() {
            Some(s) => s.engine.clone(),
            None => return Err(ApiError::bad_request("no project: send one in the request or PUT /project")),
        },
    };
    tokio::task::spawn_blocking(move || f(&engine))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            message: e.to_string(),
            stage: None,
        })?
}

async fn get_project(State(state): State<AppState>) -> ApiResult<Json<ProjectFile>> {
    match state.session() {
        Some(s) => Ok(Json(s.project.clone())),
        None => Err(ApiError {
            status: StatusCode::NOT_FOUND,
            message: "no project loaded".into(),
            stage: None,
        }),
    }
}

async fn put_project(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<ProjectFile>> {
    let project: ProjectFile = parse(&body)?;
    project.validate().map_err(|e| ApiError::bad_request(e.to_string()))?;
    let s = state.clone();
    let p = project.clone();
    tokio::task::spawn_blocking(move || s.set_project(p))
        .await
        .map_err(|e| ApiError::bad_request(e.to_string()))??;
    Ok(Json(project))
}

async fn analyze(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: DocRequest = parse(&body)?;
    with_engine(&state, req.project, move |engine| {
        let words = engine.analyze(&req.text);
        let records: Value = serde_json::from_str(&solutions_to_string(&words)).expect("solutions JSON");
        Ok(Json(json!({ "words": records })))
    })
    .await
}

#[derive(Debug, Serialize)]
struct WordTags {
    word: String,
    index: usize,
    length: usize,
    tags: Vec<String>,
}

async fn simulate_mbf(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: DocRequest = parse(&body)?;
    with_engine(&state, req.project, move |engine| {
        let doc = engine.document(&req.text);
        let words: Vec<WordTags> = doc
            .tags
            .words
            .iter()
            .zip(&doc.tags.per_word)
            .map(|(w, tags)| WordTags {
                word: w.surface.clone(),
                index: w.index,
                length: w.length,
                tags: tags.iter().cloned().collect(),
            })
            .collect();
        Ok(Json(json!({ "words": words })))
    })
    .await
}

async fn simulate_mre(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: DocRequest = parse(&body)?;
    with_engine(&state, req.project, move |engine| {
        let doc = engine.document(&req.text);
        let matches = engine.simulate(&doc)?;
        Ok(Json(json!({ "matches": match_records(&doc, &matches) })))
    })
    .await
}

async fn extract_relations(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: DocRequest = parse(&body)?;
    with_engine(&state, req.project, move |engine| {
        let doc = engine.document(&req.text);
        let matches = engine.simulate(&doc)?;
        Ok(Json(json!(engine.relations(&doc, &matches))))
    })
    .await
}

async fn run_actions(State(state): State<AppState>, body: Bytes) -> ApiResult<Json<Value>> {
    let req: DocRequest = parse(&body)?;
    with_engine(&state, req.project, move |engine| {
        let doc = engine.document(&req.text);
        let matches = engine.simulate(&doc)?;
        let env = engine.run_actions(&doc, &matches)?;
        Ok(Json(json!(env)))
    })
    .await
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct DiffRequest {
    reference: Vec<Tag>,
    candidate: Vec<Tag>,
    #[serde(default = "default_predicate")]
    predicate: MatchPredicate,
    #[serde(default)]
    document_length: Option<usize>,
}

fn default_predicate() -> MatchPredicate {
    MatchPredicate::Exact
}

async fn diff(body: Bytes) -> ApiResult<Json<Value>> {
    let req: DiffRequest = parse(&body)?;
    let report = match req.document_length {
        Some(n) => diff_tags_checked(&req.reference, &req.candidate, req.predicate, n)
            .map_err(|e| ApiError::bad_request(e.to_string()))?,
        None => diff_tags(&req.reference, &req.candidate, req.predicate),
    };
    Ok(Json(json!(report)))
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/project", get(get_project).put(put_project))
        .route("/analyze", post(analyze))
        .route("/simulate/mbf", post(simulate_mbf))
        .route("/simulate/mre", post(simulate_mre))
        .route("/extract/relations", post(extract_relations))
        .route("/actions/run", post(run_actions))
        .route("/diff", post(diff))
        .with_state(state)
}

/// Serves the API on `addr` until the process ends.
pub async fn serve(addr: std::net::SocketAddr, state: AppState) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    axum::serve(listener, router(state)).await
}
