//! Stateless HTTP facade: `POST /v1/check`, `POST /v1/action`, `GET /healthz`.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{DefaultBodyLimit, State};
use axum::http::{header, HeaderValue, Method, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::json;
use tokio::sync::Semaphore;
use tower_http::cors::{AllowOrigin, CorsLayer};

use crate::report::report;
use crate::session::{Config, OpError, Outcome, Session};
use crate::smt::SharedCache;

pub const DEFAULT_PORT: u16 = 8645;
pub const MAX_BODY: usize = 256 * 1024;
pub const WORKERS: usize = 4;
const FILE: &str = "input.lqh";

#[derive(Clone)]
pub struct AppState {
    pub config: Config,
    permits: Arc<Semaphore>,
    cache: SharedCache,
}

impl AppState {
    pub fn new(config: Config) -> Self {
        AppState {
            config,
            permits: Arc::new(Semaphore::new(WORKERS)),
            cache: SharedCache::default(),
        }
    }
}

#[derive(Debug, Deserialize)]
struct CheckRequest {
    source: String,
}

#[derive(Debug, Deserialize)]
struct ActionRequest {
    source: String,
    hole: String,
    action: String,
    /// Variable to split on, or expression text to fill in.
    #[serde(default)]
    args: Option<String>,
    #[serde(default)]
    auto_unit: bool,
}

struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(json!({ "error": self.1 }))).into_response()
    }
}

impl From<OpError> for ApiError {
    fn from(e: OpError) -> Self {
        let status = match &e {
            OpError::UnknownHole(_) => StatusCode::NOT_FOUND,
            OpError::NotApplicable(_) | OpError::Parse(_) => StatusCode::CONFLICT,
            OpError::BadExpr(_) => StatusCode::BAD_REQUEST,
            OpError::Solver(_) => StatusCode::SERVICE_UNAVAILABLE,
        };
        let msg = match &e {
            OpError::Parse(ds) => ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"),
            other => other.to_string(),
        };
        ApiError(status, msg)
    }
}

fn parse<T: for<'de> Deserialize<'de>>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError(StatusCode::BAD_REQUEST, format!("malformed request: {e}")))
}

/// Runs `f` on a fresh session (one solver process) on the blocking pool,
/// at most `WORKERS` at a time.
async fn with_session<R: Send + 'static>(
    st: &AppState,
    f: impl FnOnce(&mut Session) -> Result<R, ApiError> + Send + 'static,
) -> Result<R, ApiError> {
    let _permit = st
        .permits
        .clone()
        .acquire_owned()
        .await
        .map_err(|_| ApiError(StatusCode::SERVICE_UNAVAILABLE, "shutting down".into()))?;
    let config = st.config.clone();
    let cache = st.cache.clone();
    tokio::task::spawn_blocking(move || {
        let mut s =
            Session::with_cache(config, cache).map_err(|e| ApiError(StatusCode::SERVICE_UNAVAILABLE, e.to_string()))?;
        f(&mut s)
    })
    .await
    .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?
}

async fn check(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: CheckRequest = parse(&body)?;
    let r = with_session(&st, move |s| {
        let a = s.analyze(&req.source);
        if let Some(f) = a.solver_failure() {
            return Err(OpError::Solver(f.to_string()).into());
        }
        Ok(report(FILE, &a, true))
    })
    .await?;
    Ok(Json(r).into_response())
}

async fn action(State(st): State<AppState>, body: Bytes) -> Result<Response, ApiError> {
    let req: ActionRequest = parse(&body)?;
    if !["split", "fill_unit", "fill_expr"].contains(&req.action.as_str()) {
        return Err(ApiError(
            StatusCode::BAD_REQUEST,
            format!("unknown action `{}`", req.action),
        ));
    }
    let r = with_session(&st, move |s| {
        let o: Outcome = match req.action.as_str() {
            "split" => s.split(&req.source, &req.hole, req.args.as_deref(), req.auto_unit)?,
            "fill_unit" => s.fill_unit(&req.source, &req.hole)?,
            _ => {
                let text = req
                    .args
                    .as_deref()
                    .ok_or_else(|| ApiError(StatusCode::BAD_REQUEST, "fill_expr needs `args`".into()))?;
                s.fill(&req.source, &req.hole, text)?
            }
        };
        let mut r = report(FILE, &o.analysis, true);
        r.new_source = Some(o.source);
        Ok(r)
    })
    .await?;
    Ok(Json(r).into_response())
}

async fn healthz(State(st): State<AppState>) -> Response {
    let probe = with_session(&st, |s| {
        let name = s.solver().describe();
        Ok(s.solver().probe().map(|_| name).map_err(|e| e.to_string()))
    })
    .await;
    let solver = match probe {
        Ok(Ok(name)) => json!({ "ok": true, "solver": name }),
        Ok(Err(e)) | Err(ApiError(_, e)) => json!({ "ok": false, "error": e }),
    };
    Json(json!({ "status": "ok", "solver": solver })).into_response()
}

fn localhost(origin: &HeaderValue) -> bool {
    let Ok(o) = origin.to_str() else { return false };
    let rest = o.strip_prefix("http://").or_else(|| o.strip_prefix("https://"));
    rest.is_some_and(|r| {
        let host = r.rsplit_once(':').map_or(r, |(h, _)| h);
        matches!(host, "localhost" | "127.0.0.1" | "[::1]")
    })
}

pub fn router(config: Config) -> Router {
    let cors = CorsLayer::new()
        .allow_origin(AllowOrigin::predicate(|o, _| localhost(o)))
        .allow_methods([Method::GET, Method::POST])
        .allow_headers([header::CONTENT_TYPE]);
    Router::new()
        .route("/v1/check", post(check))
        .route("/v1/action", post(action))
        .route("/healthz", get(healthz))
        .layer(DefaultBodyLimit::max(MAX_BODY))
        .layer(cors)
        .with_state(AppState::new(config))
}

pub async fn serve(config: Config, port: u16) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(("127.0.0.1", port)).await?;
    axum::serve(listener, router(config)).await
}
