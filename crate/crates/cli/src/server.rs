//! JSON service: `POST /api/segment`, `POST /api/prune`, `GET /api/health`.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Serialize;

use viccheda_core::{Engine, Error, Scorer};

use crate::dto::{
    ErrorResponse, HealthResponse, LatticeDto, PruneRequest, SegmentRequest, SegmentResponse, SolutionDto,
    SCHEMA_VERSION,
};
use crate::prune::{prune, validate};
use crate::{segment_raw, RequestOptions, Segmented};

#[derive(Clone)]
pub struct AppState {
    pub engine: Arc<Engine>,
    /// Solution cap applied to every request.
    pub cap: Option<usize>,
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/api/segment", post(segment))
        .route("/api/prune", post(prune_handler))
        .route("/api/health", get(health))
        .with_state(state)
}

struct ApiError(StatusCode, ErrorResponse);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(self.1)).into_response()
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError(r.status(), ErrorResponse::new("BadRequest", r.body_text()))
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidPhoneme { position, .. } => {
                let mut body = ErrorResponse::new("InvalidPhoneme", e.to_string());
                body.error.position = Some(position);
                ApiError(StatusCode::BAD_REQUEST, body)
            }
            Error::EmptyInput => ApiError(StatusCode::UNPROCESSABLE_ENTITY, ErrorResponse::new("EmptyInput", e.to_string())),
            other => ApiError(StatusCode::INTERNAL_SERVER_ERROR, ErrorResponse::new("Internal", other.to_string())),
        }
    }
}

fn options(state: &AppState, scorer: Option<&str>, dedup: Option<bool>) -> Result<RequestOptions, ApiError> {
    let scorer = match scorer {
        Some(s) => s
            .parse::<Scorer>()
            .map_err(|msg| ApiError(StatusCode::BAD_REQUEST, ErrorResponse::new("UnknownScorer", msg)))?,
        None => Scorer::default(),
    };
    Ok(RequestOptions {
        scorer,
        dedup: dedup.unwrap_or(true),
        sort: true,
        cap: state.cap,
    })
}

async fn run(state: &AppState, text: String, opts: RequestOptions) -> Result<Segmented, ApiError> {
    let engine = state.engine.clone();
    tokio::task::spawn_blocking(move || segment_raw(&engine, &text, &opts))
        .await
        .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, ErrorResponse::new("Internal", e.to_string())))?
        .map_err(ApiError::from)
}

fn respond<T: Serialize>(status: StatusCode, body: T) -> Response {
    (status, Json(body)).into_response()
}

async fn segment(State(state): State<AppState>, body: Result<Json<SegmentRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(req) = body?;
    let opts = options(&state, req.scorer.as_deref(), req.dedup)?;
    let out = run(&state, req.text, opts).await?;
    let mut resp = SegmentResponse::new(out.text.as_str(), opts.scorer, opts.dedup, &out.segmentation);
    let auto = &state.engine.automaton;
    resp.lattice = Some(LatticeDto::new(&out.lattice, |s| auto.name(s).to_string()));
    Ok(respond(StatusCode::OK, resp))
}

async fn prune_handler(State(state): State<AppState>, body: Result<Json<PruneRequest>, JsonRejection>) -> Result<Response, ApiError> {
    let Json(req) = body?;
    let opts = options(&state, req.scorer.as_deref(), req.dedup)?;
    let out = run(&state, req.text, opts).await?;
    validate(&req.constraints, out.text.len())
        .map_err(|e| ApiError(StatusCode::BAD_REQUEST, ErrorResponse::new("BadConstraint", e.to_string())))?;
    let kept = prune(&out.segmentation.solutions, &req.constraints);
    let mut resp = SegmentResponse::new(out.text.as_str(), opts.scorer, opts.dedup, &out.segmentation);
    resp.solutions = kept.iter().map(SolutionDto::from).collect();
    if kept.is_empty() && !out.segmentation.solutions.is_empty() {
        resp.reason = Some("the constraints exclude every solution".into());
        return Ok(respond(StatusCode::CONFLICT, resp));
    }
    Ok(respond(StatusCode::OK, resp))
}

async fn health(State(state): State<AppState>) -> Json<HealthResponse> {
    Json(HealthResponse {
        schema: SCHEMA_VERSION,
        status: "ok".into(),
        lexicon_entries: state.engine.lexicon.len(),
        rules: state.engine.rules.len(),
        states: state.engine.automaton.state_count(),
    })
}

/// Serves until the process is stopped.
pub async fn serve(state: AppState, addr: &str) -> anyhow::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}
