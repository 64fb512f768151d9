//! HTTP API under `/api/v1`.
//!
//! Assessments run as jobs: `POST /assess` validates the request, records a
//! job and answers 202; a bounded pool of blocking workers runs the job and
//! stores the report.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;
use tokio::sync::Semaphore;

use reprolint_core::appsim::AppModel;
use reprolint_core::quality::render_html;
use reprolint_core::resolve::MatchConfig;

use crate::pipeline::{self, EXPLORATION_BUDGET};
use crate::settings::{build_config, Overrides};
use crate::store::{JobRecord, JobStatus, Store, StoreError};

#[derive(Debug, Error)]
pub enum ApiError {
    #[error("{0}")]
    Malformed(String),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Internal(String),
}

impl ApiError {
    fn status(&self) -> StatusCode {
        match self {
            ApiError::Malformed(_) => StatusCode::BAD_REQUEST,
            ApiError::NotFound(_) => StatusCode::NOT_FOUND,
            ApiError::Invalid(_) => StatusCode::UNPROCESSABLE_ENTITY,
            ApiError::Internal(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> ApiError {
        ApiError::Internal(e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        if let ApiError::Internal(msg) = &self {
            tracing::error!("{msg}");
        }
        (self.status(), Json(json!({ "error": self.to_string() }))).into_response()
    }
}

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<Store>,
    /// Lowest-precedence parameters, from the server's config file.
    pub defaults: Overrides,
    pub matching: MatchConfig,
    pub workers: Arc<Semaphore>,
}

impl AppState {
    pub fn new(store: Store, workers: usize) -> AppState {
        AppState {
            store: Arc::new(store),
            defaults: Overrides::default(),
            matching: MatchConfig::default(),
            workers: Arc::new(Semaphore::new(workers.max(1))),
        }
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/v1/apps", get(list_apps).post(upload_app))
        .route("/api/v1/apps/{id}", get(get_app))
        .route("/api/v1/assess", post(submit_assessment))
        .route("/api/v1/jobs/{id}", get(get_job))
        .route("/api/v1/reports/{id}", get(get_report))
        .route("/api/v1/wireframes/{id}", get(get_wireframe))
        .with_state(state)
}

/// Parses a JSON body: syntax errors are 400, shape errors 422.
fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> Result<T, ApiError> {
    let value: Value = serde_json::from_slice(body)
        .map_err(|e| ApiError::Malformed(format!("malformed JSON: {e}")))?;
    serde_json::from_value(value).map_err(|e| ApiError::Invalid(e.to_string()))
}

fn blocking_failed(e: tokio::task::JoinError) -> ApiError {
    ApiError::Internal(format!("worker failed: {e}"))
}

async fn upload_app(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let _: Value = serde_json::from_slice(&body)
        .map_err(|e| ApiError::Malformed(format!("malformed JSON: {e}")))?;
    let text = String::from_utf8(body.to_vec())
        .map_err(|_| ApiError::Malformed("body is not UTF-8".into()))?;
    let model = AppModel::from_json(&text).map_err(|e| ApiError::Invalid(e.to_string()))?;
    let store = st.store.clone();
    let entry = tokio::task::spawn_blocking(move || {
        let graph = pipeline::explore(&model, EXPLORATION_BUDGET);
        store.add_app(&model, &graph)
    })
    .await
    .map_err(blocking_failed)??;
    Ok((StatusCode::CREATED, Json(entry)).into_response())
}

async fn list_apps(State(st): State<AppState>) -> Json<Value> {
    Json(json!({ "apps": st.store.apps() }))
}

async fn get_app(State(st): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let model = st
        .store
        .app_model(&id)?
        .ok_or_else(|| ApiError::NotFound(format!("unknown app {id}")))?;
    Ok((
        [(header::CONTENT_TYPE, "application/json")],
        model.to_json(),
    )
        .into_response())
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct AssessRequest {
    report: String,
    app_id: String,
    #[serde(default)]
    labels: Option<String>,
    #[serde(default)]
    config: Overrides,
}

async fn submit_assessment(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: AssessRequest = parse_body(&body)?;
    if st.store.app_entry(&req.app_id).is_none() {
        return Err(ApiError::NotFound(format!("unknown app {}", req.app_id)));
    }
    pipeline::validate_inputs(&req.report, req.labels.as_deref())
        .map_err(|e| ApiError::Invalid(e.to_string()))?;
    let cfg = build_config(&[&req.config, &st.defaults], st.matching.clone())
        .map_err(|e| ApiError::Invalid(e.to_string()))?;
    let job = st.store.create_job(
        &req.report,
        req.labels.as_deref(),
        &req.app_id,
        Overrides::resolved(&cfg),
    )?;
    tokio::spawn(run_job(st.clone(), job.clone()));
    let location = format!("/api/v1/jobs/{}", job.job_id);
    Ok((
        StatusCode::ACCEPTED,
        [(header::LOCATION, location)],
        Json(json!({ "jobId": job.job_id, "status": job.status })),
    )
        .into_response())
}

async fn run_job(st: AppState, job: JobRecord) {
    let Ok(_permit) = st.workers.clone().acquire_owned().await else {
        return;
    };
    let id = job.job_id.clone();
    if let Err(e) = st.store.set_job_status(&id, JobStatus::Running, None, None) {
        tracing::error!("job {id}: {e}");
    }
    let store = st.store.clone();
    let matching = st.matching.clone();
    let outcome = tokio::task::spawn_blocking(move || -> Result<String, String> {
        let (report, labels) = store.job_inputs(&job).map_err(|e| e.to_string())?;
        let model = store
            .app_model(&job.app_id)
            .map_err(|e| e.to_string())?
            .ok_or("app disappeared from the store")?;
        let graph = store
            .app_graph(&job.app_id)
            .map_err(|e| e.to_string())?
            .ok_or("app disappeared from the store")?;
        let cfg = build_config(&[&job.config], matching).map_err(|e| e.to_string())?;
        let qr = pipeline::run(&report, labels.as_deref(), &model, &graph, &cfg)
            .map_err(|e| e.to_string())?;
        store.put_report(&qr).map_err(|e| e.to_string())
    })
    .await
    .unwrap_or_else(|e| Err(format!("worker failed: {e}")));
    let update = match outcome {
        Ok(report_id) => st
            .store
            .set_job_status(&id, JobStatus::Done, Some(report_id), None),
        Err(msg) => {
            tracing::warn!("job {id} failed: {msg}");
            st.store
                .set_job_status(&id, JobStatus::Failed, None, Some(msg))
        }
    };
    if let Err(e) = update {
        tracing::error!("job {id}: {e}");
    }
}

async fn get_job(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> Result<Json<JobRecord>, ApiError> {
    st.store
        .job(&id)
        .map(Json)
        .ok_or_else(|| ApiError::NotFound(format!("unknown job {id}")))
}

fn wants_html(headers: &HeaderMap) -> bool {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|accept| {
            let html = accept.find("text/html");
            let json = accept.find("application/json");
            match (html, json) {
                (Some(h), Some(j)) => h < j,
                (Some(_), None) => true,
                _ => false,
            }
        })
}

async fn get_report(
    State(st): State<AppState>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let not_found = || ApiError::NotFound(format!("unknown report {id}"));
    if wants_html(&headers) {
        let report = st.store.report(&id)?.ok_or_else(not_found)?;
        return Ok((
            [(header::CONTENT_TYPE, "text/html; charset=utf-8")],
            render_html(&report),
        )
            .into_response());
    }
    let json = st.store.report_json(&id)?.ok_or_else(not_found)?;
    Ok(([(header::CONTENT_TYPE, "application/json")], json).into_response())
}

async fn get_wireframe(
    State(st): State<AppState>,
    Path(id): Path<String>,
) -> Result<Response, ApiError> {
    let svg = st
        .store
        .wireframe(&id)?
        .ok_or_else(|| ApiError::NotFound(format!("unknown wireframe {id}")))?;
    Ok(([(header::CONTENT_TYPE, "image/svg+xml")], svg).into_response())
}
