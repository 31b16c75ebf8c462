//! JSON HTTP API over an immutable [`Engine`].

use crate::engine::Engine;
use aspectsim_core::corpus::{tokenize, Article, ArticleId};
use aspectsim_core::embedding::{
    embed_external_abstract, read_single_vector, AspectId, EmbedError, Vector,
};
use aspectsim_core::patterns::{
    match_external_abstract, network_for_members, run_query, target_to_all, track, CriteriaSpec,
    PatternError, QueryResult, SimilarityNetwork, TargetReport, TrackQuery, UploadMatch,
};
use aspectsim_core::simstore::{ClassCounts, PairRecord, StoreMode, Thresholds};
use axum::extract::rejection::QueryRejection;
use axum::extract::{FromRequest, Path, Query, Request, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

type AppState = Arc<Engine>;

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/api/meta", get(meta))
        .route("/api/article/{id}", get(article))
        .route("/api/pair", get(pair))
        .route("/api/query", post(query))
        .route("/api/network", post(network))
        .route("/api/target", post(target))
        .route("/api/upload-abstract", post(upload))
        .route("/api/search", get(search))
        .with_state(engine)
}

#[derive(Debug, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "InvalidRequest", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<PatternError> for ApiError {
    fn from(e: PatternError) -> Self {
        let (status, code) = match &e {
            PatternError::NoActiveCriteria => (StatusCode::BAD_REQUEST, "NoActiveCriteria"),
            PatternError::EmptyQuery => (StatusCode::BAD_REQUEST, "EmptyQuery"),
            PatternError::DisconnectedMembers => (StatusCode::BAD_REQUEST, "DisconnectedMembers"),
            PatternError::DimensionMismatch(..) => (StatusCode::BAD_REQUEST, "DimensionMismatch"),
            PatternError::UnknownId(_) => (StatusCode::NOT_FOUND, "UnknownId"),
        };
        Self::new(status, code, e.to_string())
    }
}

impl From<EmbedError> for ApiError {
    fn from(e: EmbedError) -> Self {
        let (status, code) = match &e {
            EmbedError::NoFitState => (StatusCode::CONFLICT, "NoFitState"),
            EmbedError::NoKnownTokens => (StatusCode::UNPROCESSABLE_ENTITY, "NoKnownTokens"),
            EmbedError::VectorFile { .. } => (StatusCode::BAD_REQUEST, "InvalidVectorFile"),
            _ => (StatusCode::BAD_REQUEST, "InvalidRequest"),
        };
        Self::new(status, code, e.to_string())
    }
}

/// JSON body whose rejections use the API error format.
pub struct ApiJson<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for ApiJson<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        Json::<T>::from_request(req, state)
            .await
            .map(|Json(v)| ApiJson(v))
            .map_err(|e| ApiError::invalid(e.body_text()))
    }
}

fn query_params<T>(q: Result<Query<T>, QueryRejection>) -> Result<T, ApiError> {
    q.map(|Query(v)| v)
        .map_err(|e| ApiError::invalid(e.body_text()))
}

/// Runs CPU-bound work off the async executor.
async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ApiError> + Send + 'static,
) -> Result<T, ApiError> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", e.to_string()))?
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Meta {
    pub span: (i32, i32),
    pub articles: usize,
    pub references: usize,
    pub corpus_checksum: String,
    pub thresholds: Thresholds,
    pub modes: BTreeMap<AspectId, StoreMode>,
    pub pair_counts: BTreeMap<AspectId, ClassCounts>,
    pub aspect_labels: BTreeMap<AspectId, String>,
    pub text_upload: bool,
    pub watch_dir: bool,
}

async fn meta(State(e): State<AppState>) -> Json<Meta> {
    Json(Meta {
        span: e.corpus.span(),
        articles: e.corpus.len(),
        references: e.corpus.total_references(),
        corpus_checksum: e.checksum.clone(),
        thresholds: e.thresholds(),
        modes: AspectId::ALL
            .into_iter()
            .map(|a| (a, e.model.store(a).mode()))
            .collect(),
        pair_counts: AspectId::ALL
            .into_iter()
            .map(|a| (a, e.model.store(a).counts()))
            .collect(),
        aspect_labels: AspectId::ALL
            .into_iter()
            .map(|a| (a, a.label().to_owned()))
            .collect(),
        text_upload: e.text_fit.is_some(),
        watch_dir: e.watch_dir.is_some(),
    })
}

fn lookup<'a>(e: &'a Engine, id: &ArticleId) -> Result<&'a Article, ApiError> {
    e.corpus
        .get(id)
        .ok_or_else(|| PatternError::UnknownId(id.clone()).into())
}

async fn article(
    State(e): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<Article>, ApiError> {
    lookup(&e, &ArticleId(id)).cloned().map(Json)
}

#[derive(Debug, Deserialize)]
pub struct PairParams {
    pub a: String,
    pub b: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PairDetail {
    #[serde(flatten)]
    pub record: PairRecord,
    pub shared_authors: Vec<String>,
    pub shared_words: Vec<String>,
}

async fn pair(
    State(e): State<AppState>,
    q: Result<Query<PairParams>, QueryRejection>,
) -> Result<Json<PairDetail>, ApiError> {
    let q = query_params(q)?;
    let (a, b) = (ArticleId(q.a), ArticleId(q.b));
    let (x, y) = (lookup(&e, &a)?, lookup(&e, &b)?);
    if a == b {
        return Err(ApiError::invalid("a pair needs two different articles"));
    }
    let record = e
        .model
        .pair_record(&a, &b)
        .map_err(|err| ApiError::invalid(err.to_string()))?;
    let words = |t: &str| tokenize(t).into_iter().collect::<BTreeSet<_>>();
    Ok(Json(PairDetail {
        record,
        shared_authors: x
            .authors
            .iter()
            .filter(|n| y.authors.contains(n))
            .cloned()
            .collect(),
        shared_words: words(&x.abstract_text)
            .intersection(&words(&y.abstract_text))
            .cloned()
            .collect(),
    }))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct QueryRequest {
    pub criteria: CriteriaSpec,
    #[serde(default)]
    pub tracking: Option<TrackQuery>,
}

async fn query(
    State(e): State<AppState>,
    ApiJson(req): ApiJson<QueryRequest>,
) -> Result<Json<QueryResult>, ApiError> {
    blocking(move || {
        // An empty tracking object means no tracking.
        let tracking = req.tracking.filter(|t| !t.is_empty());
        Ok(Json(run_query(
            &req.criteria,
            tracking.as_ref(),
            &e.corpus,
            &e.model,
        )?))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NetworkRequest {
    pub criteria: CriteriaSpec,
    pub members: Vec<ArticleId>,
}

async fn network(
    State(e): State<AppState>,
    ApiJson(req): ApiJson<NetworkRequest>,
) -> Result<Json<SimilarityNetwork>, ApiError> {
    blocking(move || {
        Ok(Json(network_for_members(
            &req.criteria,
            &req.members,
            &e.model,
        )?))
    })
    .await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TargetRequest {
    pub criteria: CriteriaSpec,
    pub id: ArticleId,
}

async fn target(
    State(e): State<AppState>,
    ApiJson(req): ApiJson<TargetRequest>,
) -> Result<Json<TargetReport>, ApiError> {
    blocking(move || {
        Ok(Json(target_to_all(
            &req.id,
            &req.criteria,
            &e.model,
            &e.corpus,
        )?))
    })
    .await
}

/// Exactly one of `text`, `vector` or `file`; an empty body scans the whole
/// watch directory.
#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct UploadRequest {
    pub text: Option<String>,
    pub vector: Option<Vec<f64>>,
    pub file: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct UploadResult {
    pub source: String,
    pub matches: Vec<UploadMatch>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct UploadResponse {
    pub results: Vec<UploadResult>,
}

fn match_text(e: &Engine, text: &str) -> Result<Vec<UploadMatch>, ApiError> {
    let v = embed_external_abstract(text, e.text_fit.as_ref())?;
    Ok(match_external_abstract(&v, &e.model)?)
}

fn match_vector(e: &Engine, v: Vec<f64>) -> Result<Vec<UploadMatch>, ApiError> {
    match Vector::Dense(v).normalized() {
        Vector::Null => Err(ApiError::invalid("uploaded vector is zero or not finite")),
        v => Ok(match_external_abstract(&v, &e.model)?),
    }
}

/// `.txt` files hold abstract text; anything else holds one vector.
fn match_file(e: &Engine, path: &std::path::Path) -> Result<Vec<UploadMatch>, ApiError> {
    if path.extension().is_some_and(|x| x == "txt") {
        let text =
            std::fs::read_to_string(path).map_err(|err| ApiError::invalid(err.to_string()))?;
        match_text(e, &text)
    } else {
        match_vector(e, read_single_vector(path)?)
    }
}

fn upload_sync(e: &Engine, req: UploadRequest) -> Result<UploadResponse, ApiError> {
    let given = [req.text.is_some(), req.vector.is_some(), req.file.is_some()]
        .iter()
        .filter(|&&x| x)
        .count();
    if given > 1 {
        return Err(ApiError::invalid("give only one of text, vector or file"));
    }
    let result = |source: String, matches| UploadResponse {
        results: vec![UploadResult { source, matches }],
    };
    if let Some(text) = req.text {
        return Ok(result("text".into(), match_text(e, &text)?));
    }
    if let Some(v) = req.vector {
        return Ok(result("vector".into(), match_vector(e, v)?));
    }
    let dir = e.watch_dir.as_ref().ok_or_else(|| {
        ApiError::new(
            StatusCode::CONFLICT,
            "NoWatchDir",
            "the server was started without a watch directory",
        )
    })?;
    if let Some(name) = req.file {
        let p = std::path::Path::new(&name);
        if p.components().count() != 1 || p.file_name().is_none() {
            return Err(ApiError::invalid(
                "file must be a plain file name inside the watch directory",
            ));
        }
        let path = dir.join(p);
        if !path.is_file() {
            return Err(ApiError::new(
                StatusCode::NOT_FOUND,
                "FileNotFound",
                format!("{name} not found"),
            ));
        }
        return Ok(result(name, match_file(e, &path)?));
    }
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|err| {
            ApiError::new(
                StatusCode::INTERNAL_SERVER_ERROR,
                "Internal",
                err.to_string(),
            )
        })?
        .filter_map(Result::ok)
        .map(|d| d.path())
        .filter(|p| p.is_file())
        .collect();
    files.sort();
    let results = files
        .iter()
        .map(|p| {
            let source = p
                .file_name()
                .unwrap_or_default()
                .to_string_lossy()
                .into_owned();
            match_file(e, p).map(|matches| UploadResult { source, matches })
        })
        .collect::<Result<_, _>>()?;
    Ok(UploadResponse { results })
}

async fn upload(
    State(e): State<AppState>,
    ApiJson(req): ApiJson<UploadRequest>,
) -> Result<Json<UploadResponse>, ApiError> {
    blocking(move || upload_sync(&e, req).map(Json)).await
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SearchResponse {
    pub count: usize,
    pub ids: Vec<ArticleId>,
}

async fn search(
    State(e): State<AppState>,
    q: Result<Query<TrackQuery>, QueryRejection>,
) -> Result<Json<SearchResponse>, ApiError> {
    let q = query_params(q)?;
    let ids: Vec<ArticleId> = track(&q, &e.corpus)?
        .into_iter()
        .map(|i| e.corpus.id(i).clone())
        .collect();
    Ok(Json(SearchResponse {
        count: ids.len(),
        ids,
    }))
}
