//! HTTP API under `/api/v1`.

use crate::review::{ReviewLog, ReviewRecord, ReviewStatus};
use crate::store::{RunData, RunMeta, StoredItem, StoredMetrics};
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, put};
use axum::{Json, Router};
use chrono::Utc;
use reqsmell_core::smells::{Finding, SmellKind};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, RwLock};

/// One loaded run and its review log. Reads share the lock; review writes
/// take it exclusively, so writes to a run are serialized.
#[derive(Debug)]
pub struct RunHandle {
    pub data: RunData,
    pub reviews: RwLock<ReviewLog>,
}

#[derive(Debug, Clone, Default)]
pub struct AppState {
    runs: Arc<BTreeMap<String, Arc<RunHandle>>>,
}

impl AppState {
    pub fn new(runs: impl IntoIterator<Item = (String, RunHandle)>) -> Self {
        AppState {
            runs: Arc::new(runs.into_iter().map(|(id, h)| (id, Arc::new(h))).collect()),
        }
    }

    pub fn run_ids(&self) -> impl Iterator<Item = &str> {
        self.runs.keys().map(String::as_str)
    }

    fn run(&self, id: &str) -> Result<Arc<RunHandle>, ApiError> {
        self.runs
            .get(id)
            .cloned()
            .ok_or_else(|| ApiError::not_found(format!("unknown run `{id}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorBody {
    pub code: String,
    pub message: String,
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: ErrorBody,
}

impl ApiError {
    fn new(status: StatusCode, code: &str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: ErrorBody {
                code: code.into(),
                message: message.into(),
            },
        }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, "not_found", message)
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }

    fn invalid_body(message: impl Into<String>) -> Self {
        Self::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_body", message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

/// Parsed listing filters.
#[derive(Debug, Clone, Default)]
struct Filters {
    include_rejected: bool,
    include_suppressed: bool,
    smells: Option<BTreeSet<SmellKind>>,
}

fn parse_bool(key: &str, value: &str) -> Result<bool, ApiError> {
    match value.to_ascii_lowercase().as_str() {
        "" | "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        _ => Err(ApiError::bad_request(format!(
            "`{key}` must be true or false, got `{value}`"
        ))),
    }
}

fn parse_smells(value: &str) -> Result<BTreeSet<SmellKind>, ApiError> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<SmellKind>().map_err(ApiError::bad_request))
        .collect()
}

impl Filters {
    fn from_query(q: &HashMap<String, String>) -> Result<Filters, ApiError> {
        let mut f = Filters::default();
        for (k, v) in q {
            match k.as_str() {
                "include_rejected" => f.include_rejected = parse_bool(k, v)?,
                "include_suppressed" => f.include_suppressed = parse_bool(k, v)?,
                "smells" => f.smells = Some(parse_smells(v)?),
                other => {
                    return Err(ApiError::bad_request(format!(
                        "unknown query parameter `{other}`"
                    )))
                }
            }
        }
        Ok(f)
    }

    fn keeps(&self, finding: &Finding, reviews: &ReviewLog) -> bool {
        (self.include_suppressed || !finding.is_suppressed())
            && (self.include_rejected || !reviews.is_rejected(&finding.finding_id))
            && self
                .smells
                .as_ref()
                .is_none_or(|s| s.contains(&finding.smell))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FindingView {
    #[serde(flatten)]
    pub finding: Finding,
    pub status: ReviewStatus,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ItemView {
    #[serde(flatten)]
    pub item: StoredItem,
    pub findings: Vec<FindingView>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FindingDetail {
    pub finding: Finding,
    pub review: Option<ReviewRecord>,
    pub improvement_hint: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReviewRequest {
    pub status: ReviewStatus,
    #[serde(default)]
    pub comment: Option<String>,
    #[serde(default)]
    pub reviewer: Option<String>,
}

async fn list_runs(State(state): State<AppState>) -> Json<Vec<RunMeta>> {
    Json(state.runs.values().map(|h| h.data.meta.clone()).collect())
}

async fn list_artifacts(
    State(state): State<AppState>,
    Path(run): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Vec<StoredMetrics>>, ApiError> {
    let filters = Filters::from_query(&q)?;
    let handle = state.run(&run)?;
    let reviews = handle
        .reviews
        .read()
        .map_err(|_| ApiError::internal("review state poisoned"))?;
    Ok(Json(
        handle.data.metrics_where(|f| filters.keeps(f, &reviews)),
    ))
}

async fn list_items(
    State(state): State<AppState>,
    Path((run, artifact)): Path<(String, String)>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Json<Vec<ItemView>>, ApiError> {
    let filters = Filters::from_query(&q)?;
    let handle = state.run(&run)?;
    if handle.data.artifact(&artifact).is_none() {
        return Err(ApiError::not_found(format!(
            "unknown artifact `{artifact}`"
        )));
    }
    let reviews = handle
        .reviews
        .read()
        .map_err(|_| ApiError::internal("review state poisoned"))?;
    let views = handle
        .data
        .items
        .iter()
        .filter(|i| i.item.artifact_id == artifact)
        .map(|i| ItemView {
            item: i.clone(),
            findings: handle
                .data
                .findings
                .iter()
                .filter(|f| f.artifact_id == artifact && f.item_id == i.item.item_id)
                .filter(|f| filters.keeps(f, &reviews))
                .map(|f| FindingView {
                    finding: f.clone(),
                    status: reviews.status(&f.finding_id),
                })
                .collect(),
        })
        .collect();
    Ok(Json(views))
}

async fn treemap(
    State(state): State<AppState>,
    Path(run): Path<String>,
    Query(q): Query<HashMap<String, String>>,
) -> Result<Response, ApiError> {
    let mut smell = None;
    let mut rest = HashMap::new();
    for (k, v) in q {
        if k == "smell" {
            if !v.is_empty() {
                smell = Some(v.parse::<SmellKind>().map_err(ApiError::bad_request)?);
            }
        } else {
            rest.insert(k, v);
        }
    }
    let filters = Filters::from_query(&rest)?;
    let handle = state.run(&run)?;
    let reviews = handle
        .reviews
        .read()
        .map_err(|_| ApiError::internal("review state poisoned"))?;
    Ok(Json(
        handle
            .data
            .treemap_where(|f| filters.keeps(f, &reviews), smell),
    )
    .into_response())
}

async fn get_finding(
    State(state): State<AppState>,
    Path((run, finding_id)): Path<(String, String)>,
) -> Result<Json<FindingDetail>, ApiError> {
    let handle = state.run(&run)?;
    let finding = handle
        .data
        .finding(&finding_id)
        .ok_or_else(|| ApiError::not_found(format!("unknown finding `{finding_id}`")))?;
    let reviews = handle
        .reviews
        .read()
        .map_err(|_| ApiError::internal("review state poisoned"))?;
    Ok(Json(FindingDetail {
        finding: finding.clone(),
        review: reviews.get(&finding_id).cloned(),
        improvement_hint: finding.improvement_hint.clone(),
    }))
}

async fn put_review(
    State(state): State<AppState>,
    Path((run, finding_id)): Path<(String, String)>,
    body: Bytes,
) -> Result<Json<ReviewRecord>, ApiError> {
    let handle = state.run(&run)?;
    if handle.data.finding(&finding_id).is_none() {
        return Err(ApiError::not_found(format!(
            "unknown finding `{finding_id}`"
        )));
    }
    let req: ReviewRequest =
        serde_json::from_slice(&body).map_err(|e| ApiError::invalid_body(e.to_string()))?;
    let record = ReviewRecord {
        finding_id,
        status: req.status,
        comment: req.comment,
        updated_at: Utc::now(),
        reviewer: req.reviewer,
    };
    let handle2 = handle.clone();
    let stored = record.clone();
    tokio::task::spawn_blocking(move || {
        let mut log = handle2
            .reviews
            .write()
            .map_err(|_| ApiError::internal("review state poisoned"))?;
        log.append(stored)
            .map_err(|e| ApiError::internal(format!("cannot store review: {e}")))
    })
    .await
    .map_err(|e| ApiError::internal(e.to_string()))??;
    Ok(Json(record))
}

async fn api_not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

/// Routes of the review API, to be nested under `/api/v1`.
pub fn api_router(state: AppState) -> Router {
    Router::new()
        .route("/runs", get(list_runs))
        .route("/runs/{run}/artifacts", get(list_artifacts))
        .route("/runs/{run}/artifacts/{artifact}/items", get(list_items))
        .route("/runs/{run}/treemap", get(treemap))
        .route("/runs/{run}/findings/{finding}", get(get_finding))
        .route("/runs/{run}/findings/{finding}/review", put(put_review))
        .fallback(api_not_found)
        .with_state(state)
}
