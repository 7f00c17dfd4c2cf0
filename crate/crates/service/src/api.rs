//! `/v1` JSON endpoints.
//!
//! | route | body |
//! |---|---|
//! | `GET /v1/{cases,laws}/search?…` | `SearchPage` |
//! | `GET /v1/{cases,laws}/{dataset}/{citation}` | `DocumentRecord` |
//! | `GET /v1/stats` | `CoverageReport` |
//!
//! Errors are `{"error": {"code": …, "message": …}}`. Every response carries
//! the served snapshot version in [`VERSION_HEADER`].

use std::str::FromStr;
use std::sync::Arc;

use axum::extract::{Path, RawQuery, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::Router;
use legaldata_core::DocumentKind;
use serde::Serialize;

use crate::query::query_from_pairs;
use crate::{Served, ServiceState};

pub const VERSION_HEADER: &str = "x-corpus-version";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: u16,
    pub code: &'static str,
    pub message: String,
}

impl ApiError {
    pub fn invalid_query(message: impl Into<String>) -> Self {
        ApiError { status: 400, code: "invalid_query", message: message.into() }
    }

    pub fn not_found(message: impl Into<String>) -> Self {
        ApiError { status: 404, code: "not_found", message: message.into() }
    }

    pub fn internal(message: impl Into<String>) -> Self {
        ApiError { status: 500, code: "internal", message: message.into() }
    }
}

/// A rendered response, independent of the HTTP stack.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApiResponse {
    pub status: u16,
    pub version: u64,
    /// JSON text.
    pub body: String,
}

impl ApiResponse {
    fn json<T: Serialize>(version: u64, value: &T) -> Self {
        match serde_json::to_string(value) {
            Ok(body) => ApiResponse { status: 200, version, body },
            Err(e) => Self::error(version, ApiError::internal(e.to_string())),
        }
    }

    fn error(version: u64, err: ApiError) -> Self {
        let body = serde_json::json!({ "error": err }).to_string();
        ApiResponse { status: err.status, version, body }
    }
}

impl IntoResponse for ApiResponse {
    fn into_response(self) -> Response {
        let status = StatusCode::from_u16(self.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        let mut resp = (status, [(header::CONTENT_TYPE, "application/json")], self.body).into_response();
        resp.headers_mut().insert(VERSION_HEADER, HeaderValue::from(self.version));
        resp
    }
}

fn collection_kind(collection: &str) -> Result<DocumentKind, ApiError> {
    match collection {
        "cases" | "laws" => Ok(DocumentKind::from_str(collection).expect("known collection")),
        other => Err(ApiError::not_found(format!("no collection `{other}` (expected cases or laws)"))),
    }
}

fn search(served: &Served, collection: &str, raw_query: Option<&str>) -> Result<ApiResponse, ApiError> {
    let kind = collection_kind(collection)?;
    let pairs = url::form_urlencoded::parse(raw_query.unwrap_or("").as_bytes()).into_owned();
    let q = query_from_pairs(kind, pairs).map_err(ApiError::invalid_query)?;
    let page = served.index.search(&q).map_err(|e| ApiError::invalid_query(e.to_string()))?;
    Ok(ApiResponse::json(served.version(), &page))
}

/// `GET /v1/{collection}/search?{raw_query}`.
pub fn handle_search(state: &ServiceState, collection: &str, raw_query: Option<&str>) -> ApiResponse {
    let served = state.current();
    search(&served, collection, raw_query).unwrap_or_else(|e| ApiResponse::error(served.version(), e))
}

/// `GET /v1/{collection}/{dataset}/{citation}`; `citation` is already
/// URL-decoded.
pub fn handle_get_document(state: &ServiceState, collection: &str, dataset: &str, citation: &str) -> ApiResponse {
    let served = state.current();
    let version = served.version();
    let found = collection_kind(collection).and_then(|kind| {
        served
            .snapshot()
            .find(dataset, citation)
            .filter(|r| r.kind == kind)
            .ok_or_else(|| ApiError::not_found(format!("no {collection} document {dataset}/{citation}")))
    });
    match found {
        Ok(record) => ApiResponse::json(version, record),
        Err(e) => ApiResponse::error(version, e),
    }
}

/// `GET /v1/stats`.
pub fn handle_stats(state: &ServiceState) -> ApiResponse {
    let served = state.current();
    ApiResponse::json(served.version(), &served.coverage)
}

async fn search_route(
    State(state): State<Arc<ServiceState>>,
    Path(collection): Path<String>,
    RawQuery(query): RawQuery,
) -> ApiResponse {
    handle_search(&state, &collection, query.as_deref())
}

async fn document_route(
    State(state): State<Arc<ServiceState>>,
    Path((collection, dataset, citation)): Path<(String, String, String)>,
) -> ApiResponse {
    handle_get_document(&state, &collection, &dataset, &citation)
}

async fn stats_route(State(state): State<Arc<ServiceState>>) -> ApiResponse {
    handle_stats(&state)
}

async fn fallback(State(state): State<Arc<ServiceState>>) -> ApiResponse {
    ApiResponse::error(state.version(), ApiError::not_found("no such endpoint"))
}

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/v1/stats", get(stats_route))
        .route("/v1/{collection}/search", get(search_route))
        .route("/v1/{collection}/{dataset}/{*citation}", get(document_route))
        .fallback(fallback)
        .with_state(state)
}
