//! Message handling for one live writing session.
//!
//! Inbound frames are `{"t":s,"x":u,"y":u,"p":[0,1],"pen":name}`; every
//! inbound frame gets exactly one reply, either `{"gain":g,"t":s}` or
//! `{"error":msg}`. Errors never end the session.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::coupling::{coupled_amplitude, CouplingParams, CouplingState, TracePoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inbound<'a> {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub p: f64,
    #[serde(borrow)]
    pub pen: &'a str,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Outbound {
    pub gain: f64,
    pub t: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorReply {
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Reply {
    Gain(Outbound),
    Error(ErrorReply),
}

impl Reply {
    fn error(msg: impl Into<String>) -> Self {
        Reply::Error(ErrorReply { error: msg.into() })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reply serializes")
    }
}

/// Coupling parameters by pen name, shared by all sessions.
pub type PenTable = BTreeMap<String, CouplingParams>;

/// Per-connection state. Messages must be fed in arrival order.
#[derive(Debug, Clone)]
pub struct Session {
    pens: Arc<PenTable>,
    state: Option<CouplingState>,
}

impl Session {
    pub fn new(pens: Arc<PenTable>) -> Self {
        Self { pens, state: None }
    }

    pub fn handle(&mut self, msg: &Inbound<'_>) -> Reply {
        let Some(params) = self.pens.get(msg.pen) else {
            return Reply::error("unknown pen");
        };
        if !(msg.p.is_finite() && (0.0..=1.0).contains(&msg.p)) {
            return Reply::error("pressure out of range");
        }
        let point = TracePoint {
            t: msg.t,
            x: msg.x,
            y: msg.y,
            pressure: msg.p,
        };
        let state = match &mut self.state {
            Some(s) => s,
            None => match CouplingState::new(params.ema_alpha) {
                Ok(s) => self.state.insert(s),
                Err(e) => return Reply::error(e.to_string()),
            },
        };
        // switching pens keeps the speed estimate but adopts the new
        // smoothing factor
        state.ema_alpha = params.ema_alpha;
        // validate before mutating so a bad frame leaves the state as is
        if let Some(last) = state.last_point {
            if !(msg.t > last.t) {
                return Reply::error("non-increasing timestamp");
            }
        }
        let speed = match state.update(&point) {
            Ok(v) => v,
            Err(e) => return Reply::error(e.to_string()),
        };
        match coupled_amplitude(params, msg.p, speed) {
            Ok(gain) => Reply::Gain(Outbound { gain, t: msg.t }),
            Err(e) => Reply::error(e.to_string()),
        }
    }

    /// Parse one text frame and produce the reply frame.
    pub fn handle_text(&mut self, text: &str) -> String {
        match serde_json::from_str::<Inbound<'_>>(text) {
            Ok(msg) => self.handle(&msg),
            Err(e) => Reply::error(format!("malformed message: {e}")),
        }
        .to_json()
    }
}
