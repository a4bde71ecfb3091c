//! HTTP asset endpoints and the `/session` message channel.
//!
//! - `GET /presets`: JSON list of pens with their coupling parameters
//! - `GET /presets/{name}/audio.wav`, `GET /presets/{name}/tactile.wav`
//! - `GET /session`: websocket; one JSON reply per inbound text frame, in
//!   order

use std::net::SocketAddr;
use std::sync::Arc;

use anyhow::{Context, Result};
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde::Serialize;
use tokio::net::TcpListener;

use penfeel_core::session::{PenTable, Session};

use crate::presets::{PenPreset, PresetStore, AUDIO_FILE, TACTILE_FILE};

struct AppState {
    store: PresetStore,
    pens: Arc<PenTable>,
}

pub fn router(store: PresetStore) -> Router {
    let pens = Arc::new(store.pen_table());
    let state = Arc::new(AppState { store, pens });
    Router::new()
        .route("/presets", get(list_presets))
        .route("/presets/{name}/{file}", get(preset_asset))
        .route("/session", get(session))
        .with_state(state)
}

/// Serve until the process is stopped.
pub async fn serve(listener: TcpListener, store: PresetStore) -> Result<()> {
    axum::serve(listener, router(store)).await.context("server failed")
}

pub async fn bind(host: &str, port: u16) -> Result<TcpListener> {
    let addr: SocketAddr = format!("{host}:{port}").parse().with_context(|| format!("bad address {host}:{port}"))?;
    TcpListener::bind(addr).await.with_context(|| format!("cannot listen on {addr}"))
}

fn allow_any_origin(mut resp: Response) -> Response {
    resp.headers_mut()
        .insert(header::ACCESS_CONTROL_ALLOW_ORIGIN, HeaderValue::from_static("*"));
    resp
}

#[derive(Serialize)]
struct PresetEntry<'a> {
    #[serde(flatten)]
    preset: &'a PenPreset,
    audio: String,
    tactile: String,
}

async fn list_presets(State(state): State<Arc<AppState>>) -> Response {
    let entries: Vec<PresetEntry<'_>> = state
        .store
        .presets
        .values()
        .map(|p| PresetEntry {
            preset: p,
            audio: format!("/presets/{}/{AUDIO_FILE}", p.name),
            tactile: format!("/presets/{}/{TACTILE_FILE}", p.name),
        })
        .collect();
    allow_any_origin(Json(entries).into_response())
}

async fn preset_asset(State(state): State<Arc<AppState>>, Path((name, file)): Path<(String, String)>) -> Response {
    let Some(preset) = state.store.presets.get(&name) else {
        return (StatusCode::NOT_FOUND, "unknown preset").into_response();
    };
    let bytes = match file.as_str() {
        AUDIO_FILE => preset.audio_wav.clone(),
        TACTILE_FILE => preset.tactile_wav.clone(),
        _ => return (StatusCode::NOT_FOUND, "unknown asset").into_response(),
    };
    allow_any_origin(([(header::CONTENT_TYPE, "audio/wav")], bytes).into_response())
}

async fn session(ws: WebSocketUpgrade, State(state): State<Arc<AppState>>) -> Response {
    let pens = Arc::clone(&state.pens);
    ws.on_upgrade(move |socket| run_session(socket, pens))
}

async fn run_session(mut socket: WebSocket, pens: Arc<PenTable>) {
    let mut session = Session::new(pens);
    while let Some(Ok(msg)) = socket.recv().await {
        let reply = match msg {
            Message::Text(text) => session.handle_text(text.as_str()),
            Message::Binary(_) => r#"{"error":"malformed message: binary frame"}"#.to_string(),
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
        };
        if socket.send(Message::Text(reply.into())).await.is_err() {
            break;
        }
    }
}
