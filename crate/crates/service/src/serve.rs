//! HTTP listeners.

use std::net::SocketAddr;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::Router;

use crate::api::VERSION_HEADER;
use crate::mcp::{McpServer, Session};

async fn mcp_route(State(server): State<Arc<McpServer>>, body: Bytes) -> Response {
    let version = server.state().version();
    let text = String::from_utf8_lossy(&body);
    // Each request is its own session; nothing is kept between requests.
    let mut session = Session::default();
    let mut resp = match server.handle_text(&mut session, &text) {
        Some(reply) => (StatusCode::OK, [(header::CONTENT_TYPE, "application/json")], reply).into_response(),
        None => StatusCode::ACCEPTED.into_response(),
    };
    resp.headers_mut().insert(VERSION_HEADER, HeaderValue::from(version));
    resp
}

impl McpServer {
    /// `POST /mcp` with one JSON-RPC message per request.
    pub fn router(self: Arc<Self>) -> Router {
        Router::new().route("/mcp", post(mcp_route)).with_state(self)
    }
}

/// Serves `router` on `addr` until Ctrl-C.
pub async fn serve_http(router: Router, addr: SocketAddr) -> std::io::Result<()> {
    let listener = tokio::net::TcpListener::bind(addr).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    axum::serve(listener, router)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}
