use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use coarsekit::decomposition::Strategy;
use coarsekit::game::{GameError, DEFAULT_MAX_TURNS};
use coarsekit::json::{self, Spaces};
use coarsekit::{Exact, ExactFamily, Scalar};
use serde_json::{json, Value};

use crate::store::{lock, SessionStore};

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError {
            status,
            code,
            message: message.into(),
        }
    }

    fn invalid(code: &'static str, message: impl Into<String>) -> Self {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, code, message)
    }

    fn unknown_session(id: &str) -> Self {
        ApiError::new(StatusCode::NOT_FOUND, "unknown_session", format!("no session '{id}'"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({"code": self.code, "message": self.message});
        (self.status, Json(body)).into_response()
    }
}

type ApiResult = Result<Response, ApiError>;

/// Session documents go out in the same canonical form the CLI writes, so a
/// downloaded transcript is byte-identical to `coarsekit` output.
fn canonical(status: StatusCode, v: &Value) -> Response {
    (
        status,
        [(header::CONTENT_TYPE, "application/json")],
        json::to_canonical_string(v),
    )
        .into_response()
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create_session).get(list_sessions))
        .route("/sessions/{id}", get(get_session).delete(delete_session))
        .route("/sessions/{id}/challenge", post(challenge))
        .route("/fixtures", get(list_fixtures))
        .fallback(|| async {
            ApiError::new(StatusCode::NOT_FOUND, "not_found", "no such endpoint")
        })
        .with_state(store)
}

/// Bodies are parsed by hand so that malformed JSON gets the same error
/// shape as everything else.
fn body_object(body: &Bytes) -> Result<Value, ApiError> {
    let v: Value = serde_json::from_slice(body)
        .map_err(|e| ApiError::invalid("invalid_json", e.to_string()))?;
    if !v.is_object() {
        return Err(ApiError::invalid("invalid_json", "body must be a JSON object"));
    }
    Ok(v)
}

fn session_id(raw: &str) -> Result<u64, ApiError> {
    raw.parse().map_err(|_| ApiError::unknown_session(raw))
}

fn request_family(store: &SessionStore, body: &Value) -> Result<ExactFamily, ApiError> {
    match (body.get("fixture"), body.get("family")) {
        (Some(_), Some(_)) => Err(ApiError::invalid(
            "invalid_request",
            "give either 'fixture' or 'family', not both",
        )),
        (Some(name), None) => {
            let name = name
                .as_str()
                .ok_or_else(|| ApiError::invalid("invalid_request", "'fixture' must be a string"))?;
            store
                .family(name)
                .ok_or_else(|| ApiError::invalid("unknown_fixture", format!("no fixture '{name}'")))
        }
        (None, Some(doc)) => json::family_from_json::<Exact>(doc, &mut Spaces::new())
            .map_err(|e| ApiError::invalid("invalid_family", e.to_string())),
        (None, None) => Err(ApiError::invalid(
            "invalid_request",
            "body needs 'fixture' or 'family'",
        )),
    }
}

async fn create_session(State(store): State<Arc<SessionStore>>, body: Bytes) -> ApiResult {
    let body = body_object(&body)?;
    let family = request_family(&store, &body)?;
    let bound = body
        .get("bound")
        .ok_or_else(|| ApiError::invalid("invalid_bound", "missing 'bound'"))
        .and_then(|b| {
            Exact::from_json(b).map_err(|e| ApiError::invalid("invalid_bound", e.to_string()))
        })?;
    let strategy = match body.get("strategy") {
        Some(s) => json::strategy_from_json::<Exact>(s)
            .map_err(|e| ApiError::invalid("invalid_strategy", e.to_string()))?,
        None => Strategy::net_then_grave(),
    };
    let max_turns = match body.get("max_turns") {
        Some(m) => m
            .as_u64()
            .and_then(|m| u32::try_from(m).ok())
            .ok_or_else(|| ApiError::invalid("invalid_max_turns", "'max_turns' must be a positive integer"))?,
        None => DEFAULT_MAX_TURNS,
    };
    let session = tokio::task::spawn_blocking(move || {
        store
            .create(family, bound, strategy, max_turns)
            .map(|s| json::session_to_json(&lock(&s)))
    })
    .await
    .map_err(internal)?
    .map_err(|e| match e {
        GameError::InvalidBound => ApiError::invalid("invalid_bound", e.to_string()),
        GameError::InvalidMaxTurns => ApiError::invalid("invalid_max_turns", e.to_string()),
        e => ApiError::invalid("invalid_request", e.to_string()),
    })?;
    Ok(canonical(StatusCode::CREATED, &session))
}

async fn list_sessions(State(store): State<Arc<SessionStore>>) -> Json<Value> {
    Json(store.summaries())
}

async fn get_session(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult {
    let session = store
        .get(session_id(&id)?)
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    let doc = tokio::task::spawn_blocking(move || json::session_to_json(&lock(&session)))
        .await
        .map_err(internal)?;
    Ok(canonical(StatusCode::OK, &doc))
}

/// A failing defender is a game outcome, not a request error: the session
/// ends `defender_stuck` and the updated state comes back with 200.
async fn challenge(
    State(store): State<Arc<SessionStore>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult {
    let session = store
        .get(session_id(&id)?)
        .ok_or_else(|| ApiError::unknown_session(&id))?;
    let body = body_object(&body)?;
    let r = body
        .get("r")
        .ok_or_else(|| ApiError::invalid("invalid_scale", "missing 'r'"))
        .and_then(|r| {
            Exact::from_json(r).map_err(|e| ApiError::invalid("invalid_scale", e.to_string()))
        })?;
    if r <= Exact::from_integer(0) {
        return Err(ApiError::invalid("invalid_scale", "r must be positive"));
    }
    let doc = tokio::task::spawn_blocking(move || {
        let mut s = lock(&session);
        match s.challenge(r) {
            Ok(_) | Err(GameError::StrategyFailed(_) | GameError::InvalidCertificate(_)) => {
                Ok(json::session_to_json(&s))
            }
            Err(GameError::SessionFinished) => Err(ApiError::new(
                StatusCode::CONFLICT,
                "session_finished",
                format!("session {} is {}", s.id, s.status.label()),
            )),
            Err(e) => Err(ApiError::invalid("invalid_scale", e.to_string())),
        }
    })
    .await
    .map_err(internal)??;
    Ok(canonical(StatusCode::OK, &doc))
}

async fn delete_session(State(store): State<Arc<SessionStore>>, Path(id): Path<String>) -> ApiResult {
    if store.remove(session_id(&id)?) {
        Ok(StatusCode::NO_CONTENT.into_response())
    } else {
        Err(ApiError::unknown_session(&id))
    }
}

async fn list_fixtures(State(store): State<Arc<SessionStore>>) -> Json<Value> {
    Json(store.fixtures())
}

fn internal(e: impl std::fmt::Display) -> ApiError {
    ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "internal", e.to_string())
}
