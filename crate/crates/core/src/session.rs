//! Interactive mutation session and its JSON request protocol.
//!
//! [`Session::handle`] maps `(method, path, body)` to `(status, JSON)`; an HTTP
//! server only has to forward requests. Failed transitions leave the session
//! unchanged and answer `{code, message, witness?}`.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::analysis::{c_vectors, check_nondegenerate, frame, is_sign_coherent, AnalysisError};
use crate::io::{QuiverFile, SCHEMA_VERSION};
use crate::mutation::{check_mutable, mutate_with, MutationError, MutationOptions, MutationRecord};
use crate::quiver::{VertexId, WeightedQuiver};
use crate::tame::classify_tame;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub lenient: bool,
    /// Search depth of the nondegeneracy check behind `GET /analysis/two-cycles`.
    pub analysis_depth: usize,
}

impl Default for SessionConfig {
    fn default() -> Self {
        SessionConfig {
            lenient: false,
            analysis_depth: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SessionError {
    #[error(transparent)]
    Mutation(#[from] MutationError),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("nothing to redo")]
    NothingToRedo,
    #[error("session is already framed")]
    AlreadyFramed,
    #[error("session is not framed")]
    NotFramed,
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error("bad request body: {0}")]
    BadRequest(String),
    #[error("no route for {method} {path}")]
    NotFound { method: String, path: String },
}

impl SessionError {
    pub fn code(&self) -> &'static str {
        match self {
            SessionError::Mutation(MutationError::Frozen(_)) => "frozen-vertex",
            SessionError::Mutation(MutationError::UnknownVertex(_)) => "unknown-vertex",
            SessionError::Mutation(MutationError::TwoCycle { .. }) => "two-cycle",
            SessionError::Mutation(MutationError::Invalid(_)) => "invalid-quiver",
            SessionError::NothingToUndo => "nothing-to-undo",
            SessionError::NothingToRedo => "nothing-to-redo",
            SessionError::AlreadyFramed => "already-framed",
            SessionError::NotFramed => "not-framed",
            SessionError::Analysis(_) => "analysis-failed",
            SessionError::BadRequest(_) => "bad-request",
            SessionError::NotFound { .. } => "not-found",
        }
    }

    pub fn status(&self) -> u16 {
        match self {
            SessionError::BadRequest(_) => 400,
            SessionError::NotFound { .. } => 404,
            SessionError::Mutation(MutationError::UnknownVertex(_)) => 404,
            _ => 409,
        }
    }

    pub fn witness(&self) -> Option<Value> {
        match self {
            SessionError::Mutation(MutationError::Frozen(v)) => Some(json!({ "vertex": v })),
            SessionError::Mutation(MutationError::UnknownVertex(v)) => Some(json!({ "vertex": v })),
            SessionError::Mutation(MutationError::TwoCycle { vertex, between }) => {
                Some(json!({ "vertex": vertex, "between": [between.0, between.1] }))
            }
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let mut body = json!({ "code": self.code(), "message": self.to_string() });
        if let Some(w) = self.witness() {
            body["witness"] = w;
        }
        body
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Response {
    pub status: u16,
    pub body: Value,
}

impl Response {
    fn ok(body: Value) -> Self {
        Response { status: 200, body }
    }

    fn error(e: &SessionError) -> Self {
        Response {
            status: e.status(),
            body: e.to_json(),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MutateRequest {
    vertex: VertexId,
}

/// A quiver, the mutations applied to it, and the mutations undone since.
///
/// The current quiver is the result of the last undo-stack record, or the
/// start quiver (the initial quiver, framed once framing is on).
#[derive(Debug, Clone)]
pub struct Session {
    initial: WeightedQuiver,
    start: WeightedQuiver,
    undo: Vec<MutationRecord>,
    redo: Vec<MutationRecord>,
    framed: bool,
    config: SessionConfig,
}

impl Session {
    pub fn new(initial: WeightedQuiver, config: SessionConfig) -> Result<Self, SessionError> {
        initial.ensure_valid().map_err(MutationError::from)?;
        Ok(Session {
            start: initial.clone(),
            initial,
            undo: Vec::new(),
            redo: Vec::new(),
            framed: false,
            config,
        })
    }

    pub fn initial(&self) -> &WeightedQuiver {
        &self.initial
    }

    pub fn start(&self) -> &WeightedQuiver {
        &self.start
    }

    pub fn current(&self) -> &WeightedQuiver {
        self.undo.last().map_or(&self.start, |r| &r.result)
    }

    pub fn history(&self) -> Vec<VertexId> {
        self.undo.iter().map(|r| r.vertex).collect()
    }

    pub fn is_framed(&self) -> bool {
        self.framed
    }

    pub fn config(&self) -> SessionConfig {
        self.config
    }

    fn options(&self) -> MutationOptions {
        MutationOptions {
            lenient: self.config.lenient,
        }
    }

    pub fn mutate(&mut self, k: VertexId) -> Result<(), SessionError> {
        let rec = mutate_with(self.current(), k, self.options())?;
        self.undo.push(rec);
        self.redo.clear();
        Ok(())
    }

    pub fn undo(&mut self) -> Result<(), SessionError> {
        let rec = self.undo.pop().ok_or(SessionError::NothingToUndo)?;
        self.redo.push(rec);
        Ok(())
    }

    pub fn redo(&mut self) -> Result<(), SessionError> {
        let rec = self.redo.pop().ok_or(SessionError::NothingToRedo)?;
        self.undo.push(rec);
        Ok(())
    }

    /// Frames the initial quiver and replays the history on it, so c-vectors
    /// are taken relative to the initial seed. The redo stack is dropped.
    pub fn frame(&mut self) -> Result<(), SessionError> {
        if self.framed {
            return Err(SessionError::AlreadyFramed);
        }
        let framed = frame(&self.initial)?;
        let mut records = Vec::with_capacity(self.undo.len());
        for k in self.history() {
            let base = records.last().map_or(&framed, |r: &MutationRecord| &r.result);
            records.push(mutate_with(base, k, self.options())?);
        }
        self.start = framed;
        self.undo = records;
        self.redo.clear();
        self.framed = true;
        Ok(())
    }

    pub fn state(&self) -> Value {
        let q = self.current();
        let blocked: Vec<Value> = q
            .mutable_vertices()
            .filter_map(|k| match check_mutable(q, k, self.options()) {
                Err(MutationError::TwoCycle { between, .. }) => {
                    Some(json!({ "vertex": k, "between": [between.0, between.1] }))
                }
                _ => None,
            })
            .collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "quiver": QuiverFile::from_document(q, None),
            "framed": self.framed,
            "history": self.history(),
            "redo": self.redo.iter().rev().map(|r| r.vertex).collect::<Vec<_>>(),
            "blocked": blocked,
            "config": self.config,
        })
    }

    pub fn c_vectors(&self) -> Result<Value, SessionError> {
        if !self.framed {
            return Err(SessionError::NotFramed);
        }
        let m = c_vectors(self.current())?;
        let coherence = is_sign_coherent(&m);
        Ok(json!({ "schema_version": SCHEMA_VERSION, "c_vectors": m, "sign_coherence": coherence }))
    }

    pub fn two_cycles(&self) -> Value {
        let q = self.current();
        let verdict = check_nondegenerate(q, self.config.analysis_depth);
        json!({
            "schema_version": SCHEMA_VERSION,
            "two_cycles": q.two_cycles(),
            "nondegeneracy": verdict,
        })
    }

    pub fn classify(&self) -> Value {
        json!({ "schema_version": SCHEMA_VERSION, "classification": classify_tame(self.current()) })
    }

    /// Answers a read-only request; `None` if the route changes state.
    pub fn handle_read(&self, method: &str, path: &str) -> Option<Response> {
        if method != "GET" {
            return None;
        }
        let result = match path {
            "/state" => Ok(self.state()),
            "/c-vectors" => self.c_vectors(),
            "/analysis/two-cycles" => Ok(self.two_cycles()),
            "/classify" => Ok(self.classify()),
            _ => Err(SessionError::NotFound {
                method: method.into(),
                path: path.into(),
            }),
        };
        Some(result.map_or_else(|e| Response::error(&e), Response::ok))
    }

    /// Answers any request. State-changing requests reply with the new state.
    pub fn handle(&mut self, method: &str, path: &str, body: &[u8]) -> Response {
        if let Some(r) = self.handle_read(method, path) {
            return r;
        }
        let result = match (method, path) {
            ("POST", "/mutate") => serde_json::from_slice::<MutateRequest>(body)
                .map_err(|e| SessionError::BadRequest(e.to_string()))
                .and_then(|req| self.mutate(req.vertex)),
            ("POST", "/undo") => self.undo(),
            ("POST", "/redo") => self.redo(),
            ("POST", "/frame") => self.frame(),
            _ => Err(SessionError::NotFound {
                method: method.into(),
                path: path.into(),
            }),
        };
        match result {
            Ok(()) => Response::ok(self.state()),
            Err(e) => Response::error(&e),
        }
    }
}
