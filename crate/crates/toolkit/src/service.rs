//! HTTP backend for correcting sentence-to-scene alignments by hand.
//!
//! Corpus layout under the service root:
//!
//! ```text
//! scripts/      raw `.txt` or parsed `.scenes.jsonl`
//! summaries/    raw `.txt` or parsed `.summary.json`
//! embeddings/   optional EMB1 files for the embedding aligners
//! annotations/  one `{movie_id}.json` store per movie (written by the service)
//! exports/      gold alignment and label files (written by the service)
//! ```
//!
//! Writes to a movie are serialized by a per-movie mutex; readers clone the
//! current immutable snapshot and never wait on a writer's disk IO.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use axum::extract::{Path as UrlPath, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chrono::{DateTime, SecondsFormat, TimeDelta, Utc};
use scenesal_core::{silver_labels, AlignmentMap, AlignmentMethod, MovieScript, Summary};
use serde::{Deserialize, Serialize};
use tower_http::cors::CorsLayer;

use crate::corpus::{embedding_path, load_scripts, load_summaries, ParseOptions};
use crate::error::{Result, ToolkitError};
use crate::formats::{read_embeddings, scene_records, AlignmentFile, EmbeddingUnit, LabelsFile, SceneRecord, SummaryFile};
use crate::fsio::{atomic_write, read_json, to_json_bytes};
use crate::ops::{align_movie, AlignEmbeddings, AlignOptions};

/// One annotator's scene set for one summary sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub movie_id: String,
    pub sentence_idx: usize,
    pub scene_ids: Vec<usize>,
    pub annotator: String,
    pub version: u64,
    /// RFC 3339, UTC, millisecond precision.
    pub updated_at: String,
}

/// Persisted form of a movie's annotations, sorted by sentence then annotator.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationStore {
    pub movie_id: String,
    pub records: Vec<AnnotationRecord>,
}

impl AnnotationStore {
    fn find(&self, sentence_idx: usize, annotator: &str) -> Option<&AnnotationRecord> {
        self.records.iter().find(|r| r.sentence_idx == sentence_idx && r.annotator == annotator)
    }

    /// Most recent record for a sentence across annotators.
    pub fn latest(&self, sentence_idx: usize) -> Option<&AnnotationRecord> {
        self.records
            .iter()
            .filter(|r| r.sentence_idx == sentence_idx)
            .max_by(|a, b| (&a.updated_at, a.version).cmp(&(&b.updated_at, b.version)))
    }

    fn upsert(&mut self, record: AnnotationRecord) {
        match self.records.iter_mut().find(|r| r.sentence_idx == record.sentence_idx && r.annotator == record.annotator) {
            Some(slot) => *slot = record,
            None => {
                self.records.push(record);
                self.records.sort_by(|a, b| (a.sentence_idx, &a.annotator).cmp(&(b.sentence_idx, &b.annotator)));
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub corpus: PathBuf,
    pub default_method: AlignmentMethod,
    pub parse: ParseOptions,
}

impl ServiceConfig {
    pub fn new(corpus: impl Into<PathBuf>) -> Self {
        Self { corpus: corpus.into(), default_method: AlignmentMethod::EmbedMonotonic, parse: ParseOptions::default() }
    }

    fn annotations_dir(&self) -> PathBuf {
        self.corpus.join("annotations")
    }

    fn exports_dir(&self) -> PathBuf {
        self.corpus.join("exports")
    }
}

struct Movie {
    script: MovieScript,
    summary: Summary,
    default: AlignmentMap,
    store_path: PathBuf,
    writer: tokio::sync::Mutex<()>,
    snapshot: RwLock<Arc<AnnotationStore>>,
}

impl Movie {
    fn snapshot(&self) -> Arc<AnnotationStore> {
        Arc::clone(&self.snapshot.read().expect("snapshot lock poisoned"))
    }
}

pub struct AppState {
    movies: BTreeMap<String, Movie>,
    exports: PathBuf,
}

pub type SharedState = Arc<AppState>;

fn default_alignment(
    cfg: &ServiceConfig,
    script: &MovieScript,
    summary: &Summary,
) -> Result<AlignmentMap> {
    let id = script.movie_id();
    let mut options = AlignOptions { method: cfg.default_method, component: None, threshold: None };
    let mut loaded = None;
    if options.method.needs_embeddings() {
        let dir = cfg.corpus.join("embeddings");
        let scenes = embedding_path(&dir, id, EmbeddingUnit::Scene);
        let sentences = embedding_path(&dir, id, EmbeddingUnit::Sentence);
        if scenes.is_file() && sentences.is_file() {
            loaded = Some((read_embeddings(&scenes, EmbeddingUnit::Scene)?, read_embeddings(&sentences, EmbeddingUnit::Sentence)?));
        } else {
            log::warn!("movie {id:?}: no embeddings, default alignment falls back to rouge-l");
            options.method = AlignmentMethod::RougeL;
        }
    }
    let embeddings = loaded.as_ref().map(|(s, t)| AlignEmbeddings { scenes: s, sentences: t });
    align_movie(script, summary, embeddings, &options, &cfg.parse.abbreviations)
}

fn load_store(path: &Path, movie_id: &str, script: &MovieScript, summary: &Summary) -> Result<AnnotationStore> {
    if !path.exists() {
        return Ok(AnnotationStore { movie_id: movie_id.to_owned(), records: Vec::new() });
    }
    let store: AnnotationStore = read_json(path)?;
    if store.movie_id != movie_id {
        return Err(ToolkitError::format(path, format!("store is for movie {:?}", store.movie_id)));
    }
    for r in &store.records {
        if r.sentence_idx >= summary.len() || r.scene_ids.iter().any(|&s| s >= script.len()) || r.version == 0 {
            return Err(ToolkitError::format(path, format!("invalid record for sentence {}", r.sentence_idx)));
        }
    }
    Ok(store)
}

/// Loads the corpus and computes every movie's default alignment.
pub fn load_state(cfg: &ServiceConfig) -> Result<SharedState> {
    let scripts = load_scripts(&cfg.corpus.join("scripts"), &cfg.parse)?;
    let mut summaries = load_summaries(&cfg.corpus.join("summaries"), &cfg.parse)?;
    let mut movies = BTreeMap::new();
    for (id, script) in scripts {
        let Some(summary) = summaries.remove(&id) else {
            log::warn!("movie {id:?} has no summary, skipped");
            continue;
        };
        let default = default_alignment(cfg, &script, &summary)?;
        let store_path = cfg.annotations_dir().join(format!("{id}.json"));
        let store = load_store(&store_path, &id, &script, &summary)?;
        movies.insert(
            id,
            Movie {
                script,
                summary,
                default,
                store_path,
                writer: tokio::sync::Mutex::new(()),
                snapshot: RwLock::new(Arc::new(store)),
            },
        );
    }
    for id in summaries.keys() {
        log::warn!("summary {id:?} has no script, skipped");
    }
    Ok(Arc::new(AppState { movies, exports: cfg.exports_dir() }))
}

pub fn router(state: SharedState) -> Router {
    Router::new()
        .route("/movies", get(list_movies))
        .route("/movies/{id}/scenes", get(get_scenes))
        .route("/movies/{id}/summary", get(get_summary))
        .route("/movies/{id}/alignment", get(get_alignment))
        .route("/movies/{id}/alignment/{sentence_idx}", put(put_alignment))
        .route("/movies/{id}/export", post(export))
        .layer(CorsLayer::permissive())
        .with_state(state)
}

pub async fn serve(cfg: &ServiceConfig, port: u16) -> Result<()> {
    let state = load_state(cfg)?;
    let addr = std::net::SocketAddr::from(([0, 0, 0, 0], port));
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| ToolkitError::Config(format!("cannot bind {addr}: {e}")))?;
    log::info!("serving {} movies on {addr}", state.movies.len());
    axum::serve(listener, router(state)).await.map_err(|e| ToolkitError::Config(format!("server error: {e}")))
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    detail: Option<serde_json::Value>,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self { status, message: message.into(), detail: None }
    }

    fn not_found(what: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, what)
    }

    fn internal(err: ToolkitError) -> Self {
        log::error!("{err}");
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, err.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = serde_json::json!({ "error": self.message });
        if let Some(detail) = self.detail {
            body["detail"] = detail;
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = std::result::Result<Json<T>, ApiError>;

fn movie<'a>(state: &'a AppState, id: &str) -> std::result::Result<&'a Movie, ApiError> {
    state.movies.get(id).ok_or_else(|| ApiError::not_found(format!("unknown movie {id:?}")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MovieSummary {
    pub movie_id: String,
    pub n_scenes: usize,
    pub n_sentences: usize,
    pub progress: f64,
}

async fn list_movies(State(state): State<SharedState>) -> Json<Vec<MovieSummary>> {
    let list = state
        .movies
        .iter()
        .map(|(id, m)| {
            let store = m.snapshot();
            let t = m.summary.len();
            let done = (0..t).filter(|&i| store.latest(i).is_some()).count();
            MovieSummary {
                movie_id: id.clone(),
                n_scenes: m.script.len(),
                n_sentences: t,
                progress: if t == 0 { 0.0 } else { done as f64 / t as f64 },
            }
        })
        .collect();
    Json(list)
}

async fn get_scenes(State(state): State<SharedState>, UrlPath(id): UrlPath<String>) -> ApiResult<Vec<SceneRecord>> {
    Ok(Json(scene_records(&movie(&state, &id)?.script)))
}

async fn get_summary(State(state): State<SharedState>, UrlPath(id): UrlPath<String>) -> ApiResult<SummaryFile> {
    Ok(Json(SummaryFile::from(&movie(&state, &id)?.summary)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Default,
    Human,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceAlignment {
    pub sentence_idx: usize,
    pub scene_ids: Vec<usize>,
    pub source: Source,
    /// 0 for default entries.
    pub version: u64,
    pub annotator: Option<String>,
    pub updated_at: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignmentView {
    pub movie_id: String,
    pub default_method: String,
    pub sentences: Vec<SentenceAlignment>,
}

async fn get_alignment(State(state): State<SharedState>, UrlPath(id): UrlPath<String>) -> ApiResult<AlignmentView> {
    let m = movie(&state, &id)?;
    let store = m.snapshot();
    let sentences = (0..m.summary.len())
        .map(|t| match store.latest(t) {
            Some(r) => SentenceAlignment {
                sentence_idx: t,
                scene_ids: r.scene_ids.clone(),
                source: Source::Human,
                version: r.version,
                annotator: Some(r.annotator.clone()),
                updated_at: Some(r.updated_at.clone()),
            },
            None => SentenceAlignment {
                sentence_idx: t,
                scene_ids: m.default.pairs()[t].iter().copied().collect(),
                source: Source::Default,
                version: 0,
                annotator: None,
                updated_at: None,
            },
        })
        .collect();
    Ok(Json(AlignmentView { movie_id: id, default_method: m.default.method().as_str().to_owned(), sentences }))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PutAlignment {
    pub scene_ids: Vec<usize>,
    pub annotator: String,
    pub expected_version: u64,
}

async fn put_alignment(
    State(state): State<SharedState>,
    UrlPath((id, sentence_idx)): UrlPath<(String, usize)>,
    Json(body): Json<PutAlignment>,
) -> ApiResult<AnnotationRecord> {
    let m = movie(&state, &id)?;
    if sentence_idx >= m.summary.len() {
        return Err(ApiError::not_found(format!("movie {id:?} has no sentence {sentence_idx}")));
    }
    let n = m.script.len();
    if let Some(bad) = body.scene_ids.iter().find(|&&s| s >= n) {
        return Err(ApiError::new(
            StatusCode::UNPROCESSABLE_ENTITY,
            format!("scene id {bad} out of range for {n} scenes"),
        ));
    }
    if body.annotator.trim().is_empty() {
        return Err(ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "annotator must not be empty"));
    }

    let _guard = m.writer.lock().await;
    let current = m.snapshot();
    let stored = current.find(sentence_idx, &body.annotator).map_or(0, |r| r.version);
    if stored != body.expected_version {
        let mut err = ApiError::new(
            StatusCode::CONFLICT,
            format!("version conflict: expected {}, stored {stored}", body.expected_version),
        );
        err.detail = Some(serde_json::json!({ "stored_version": stored }));
        return Err(err);
    }
    let mut scene_ids = body.scene_ids;
    scene_ids.sort_unstable();
    scene_ids.dedup();
    let record = AnnotationRecord {
        movie_id: id.clone(),
        sentence_idx,
        scene_ids,
        annotator: body.annotator,
        version: stored + 1,
        updated_at: next_timestamp(&current),
    };
    let mut next = (*current).clone();
    next.upsert(record.clone());
    atomic_write(&m.store_path, &to_json_bytes(&next)).map_err(ApiError::internal)?;
    *m.snapshot.write().expect("snapshot lock poisoned") = Arc::new(next);
    Ok(Json(record))
}

/// Current time, bumped past the store's newest record so ordering is strict.
fn next_timestamp(store: &AnnotationStore) -> String {
    let mut now = Utc::now();
    let newest = store.records.iter().filter_map(|r| DateTime::parse_from_rfc3339(&r.updated_at).ok()).max();
    if let Some(newest) = newest {
        let floor = newest.with_timezone(&Utc) + TimeDelta::milliseconds(1);
        if now < floor {
            now = floor;
        }
    }
    now.to_rfc3339_opts(SecondsFormat::Millis, true)
}

#[derive(Debug, Default, Deserialize)]
pub struct ExportQuery {
    #[serde(default)]
    pub partial: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportResponse {
    pub alignment: AlignmentFile,
    pub labels: LabelsFile,
    pub warnings: Vec<String>,
}

/// Gold alignment from the latest human record per sentence. In partial mode
/// sentences without one are left unaligned and reported as warnings.
pub fn export_alignment(
    movie_id: &str,
    store: &AnnotationStore,
    n_sentences: usize,
    partial: bool,
) -> std::result::Result<(AlignmentMap, Vec<String>), Vec<usize>> {
    let mut pairs = Vec::with_capacity(n_sentences);
    let mut missing = Vec::new();
    for t in 0..n_sentences {
        match store.latest(t) {
            Some(r) => pairs.push(r.scene_ids.iter().copied().collect()),
            None => {
                missing.push(t);
                pairs.push(Default::default());
            }
        }
    }
    if !missing.is_empty() && !partial {
        return Err(missing);
    }
    let warnings = missing.iter().map(|t| format!("sentence {t} has no human record; exported unaligned")).collect();
    Ok((AlignmentMap::new(movie_id, AlignmentMethod::Human, pairs), warnings))
}

async fn export(
    State(state): State<SharedState>,
    UrlPath(id): UrlPath<String>,
    Query(query): Query<ExportQuery>,
) -> ApiResult<ExportResponse> {
    let m = movie(&state, &id)?;
    let store = m.snapshot();
    let (map, warnings) = export_alignment(&id, &store, m.summary.len(), query.partial).map_err(|missing| {
        let mut err = ApiError::new(
            StatusCode::CONFLICT,
            format!("{} of {} sentences have no human record", missing.len(), m.summary.len()),
        );
        err.detail = Some(serde_json::json!({ "missing": missing }));
        err
    })?;
    let labels = silver_labels(&map, m.script.len()).map_err(|e| ApiError::internal(e.into()))?;
    let alignment = AlignmentFile::from(&map);
    let labels = LabelsFile::from(&labels);
    atomic_write(&state.exports.join(format!("{id}.alignment.json")), &to_json_bytes(&alignment))
        .map_err(ApiError::internal)?;
    atomic_write(&state.exports.join(format!("{id}.labels.json")), &to_json_bytes(&labels)).map_err(ApiError::internal)?;
    Ok(Json(ExportResponse { alignment, labels, warnings }))
}
