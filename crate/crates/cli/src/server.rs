//! HTTP front end for [`Session`]: every request is forwarded to the session,
//! reads under a shared lock and transitions under an exclusive one.

use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::State;
use axum::http::{Method, StatusCode, Uri};
use axum::response::{IntoResponse, Response};
use axum::{Json, Router};
use wquiv_core::session::Session;

pub type SharedSession = Arc<RwLock<Session>>;

pub fn app(session: Session) -> Router {
    Router::new()
        .fallback(dispatch)
        .with_state(Arc::new(RwLock::new(session)))
}

async fn dispatch(State(session): State<SharedSession>, method: Method, uri: Uri, body: Bytes) -> Response {
    let path = uri.path();
    let read = session
        .read()
        .expect("session lock")
        .handle_read(method.as_str(), path);
    let reply = match read {
        Some(r) => r,
        None => session
            .write()
            .expect("session lock")
            .handle(method.as_str(), path, &body),
    };
    let status = StatusCode::from_u16(reply.status).unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
    (status, Json(reply.body)).into_response()
}

/// Binds `127.0.0.1:port` and serves until the process ends.
pub async fn serve(session: Session, port: u16) -> std::io::Result<()> {
    let addr = SocketAddr::from(([127, 0, 0, 1], port));
    let listener = tokio::net::TcpListener::bind(addr).await?;
    eprintln!("serving session on http://{}", listener.local_addr()?);
    axum::serve(listener, app(session)).await
}
