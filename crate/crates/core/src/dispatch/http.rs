//! HTTP/JSON API over a shared [`Dispatcher`].

use std::net::SocketAddr;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};

use super::{DispatchError, Dispatcher, Submission};
use crate::dialog::Role;
use crate::layout::{generate_pattern_shape_layout, generate_random_shape_layout, Layout, PatternRules, Scenario};

pub fn unix_millis() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_millis() as u64)
}

struct ApiError(DispatchError);

impl From<DispatchError> for ApiError {
    fn from(e: DispatchError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match &self.0 {
            DispatchError::UnknownSession(_) | DispatchError::UnknownJob(_) | DispatchError::UnknownWorker(_) => StatusCode::NOT_FOUND,
            DispatchError::NotLeaseHolder => StatusCode::FORBIDDEN,
            DispatchError::LeaseExpired => StatusCode::GONE,
            DispatchError::Invalid(_) => StatusCode::BAD_REQUEST,
            _ => StatusCode::INTERNAL_SERVER_ERROR,
        };
        (status, Json(json!({ "error": self.0.code(), "message": self.0.to_string() }))).into_response()
    }
}

type Shared = State<Arc<Dispatcher>>;

/// Either an explicit reference or a shape scenario to generate one from.
#[derive(Deserialize)]
struct CreateSession {
    reference: Option<Layout>,
    scenario: Option<Scenario>,
    #[serde(default)]
    seed: u64,
}

async fn create_session(State(d): Shared, Json(req): Json<CreateSession>) -> Result<Response, ApiError> {
    let reference = match (req.reference, req.scenario) {
        (Some(reference), _) => reference,
        (None, Some(Scenario::ShapeRandom)) => generate_random_shape_layout(req.seed),
        (None, Some(Scenario::ShapePattern)) => {
            generate_pattern_shape_layout(req.seed, &PatternRules::default()).map_err(DispatchError::Invalid)?
        }
        (None, Some(s)) => return Err(DispatchError::Invalid(format!("{s} sessions need an explicit reference")).into()),
        (None, None) => return Err(DispatchError::Invalid("give a reference or a scenario".into()).into()),
    };
    let created = d.create_session(reference, unix_millis())?;
    Ok((StatusCode::CREATED, Json(created)).into_response())
}

#[derive(Deserialize)]
struct Claim {
    worker_id: String,
    role: Role,
}

async fn claim_job(State(d): Shared, Json(req): Json<Claim>) -> Result<Response, ApiError> {
    Ok(match d.claim(&req.worker_id, req.role, unix_millis())? {
        Some(job) => Json(job).into_response(),
        None => StatusCode::NO_CONTENT.into_response(),
    })
}

async fn submit_job(State(d): Shared, Path(job_id): Path<String>, Json(sub): Json<Submission>) -> Result<Response, ApiError> {
    Ok(Json(d.submit(&job_id, sub, unix_millis())?).into_response())
}

#[derive(Deserialize)]
struct ViewQuery {
    #[serde(rename = "as")]
    viewer: Option<Role>,
}

/// Defaults to the designer view, which discloses the least.
async fn get_session(State(d): Shared, Path(id): Path<String>, Query(q): Query<ViewQuery>) -> Result<Response, ApiError> {
    Ok(Json(d.session_view(&id, q.viewer.unwrap_or(Role::Designer))?).into_response())
}

fn json_lines<T: serde::Serialize>(items: &[T]) -> Response {
    let mut body = String::new();
    for item in items {
        body.push_str(&serde_json::to_string(item).expect("records serialize"));
        body.push('\n');
    }
    ([(header::CONTENT_TYPE, "application/x-ndjson")], body).into_response()
}

async fn get_transcript(State(d): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(json_lines(&d.transcript(&id)?))
}

async fn get_score(State(d): Shared, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(d.worker_score(&id)?).into_response())
}

async fn export(State(d): Shared) -> Response {
    json_lines(&d.export())
}

/// Placeholder for crowdsourcing-platform callbacks: acknowledges and drops.
async fn platform_webhook(Json(_payload): Json<Value>) -> Response {
    (StatusCode::ACCEPTED, Json(json!({ "accepted": true }))).into_response()
}

pub fn router(dispatcher: Arc<Dispatcher>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}", get(get_session))
        .route("/sessions/{id}/transcript", get(get_transcript))
        .route("/jobs/claim", post(claim_job))
        .route("/jobs/{id}/submit", post(submit_job))
        .route("/workers/{id}/score", get(get_score))
        .route("/export", get(export))
        .route("/webhooks/platform", post(platform_webhook))
        .with_state(dispatcher)
}

/// Serves the API on `addr` until the process ends.
pub async fn serve(dispatcher: Arc<Dispatcher>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(%addr, "dispatcher listening");
    axum::serve(listener, router(dispatcher)).await
}
