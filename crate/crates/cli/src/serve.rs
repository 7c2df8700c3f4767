//! HTTP JSON API for manual review of candidate clusters.
//!
//! Decisions are appended to a JSONL log that is the single source of
//! truth; the first decision on a (person, cluster) pair wins and later
//! ones are refused with 409.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::{SystemTime, UNIX_EPOCH};

use axum::extract::{Path as UrlPath, Request, State};
use axum::http::{header, StatusCode};
use axum::middleware::{self, Next};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use oeuvre::clustering::{Cluster, ClusterMeta};
use oeuvre::corpus::Corpus;
use oeuvre::portfolio::{
    append_decision, Assignment, ClusterSet, DecisionLog, PortfolioError, ReviewDecision, RosterEntry,
    Status, Verdict,
};
use serde::Serialize;
use serde_json::json;
use tower_http::services::ServeDir;

/// Environment variable holding the static bearer token. When unset the
/// API is open.
pub const TOKEN_ENV: &str = "OEUVRE_REVIEW_TOKEN";

#[derive(Debug, Clone, Serialize)]
pub struct PublicationSample {
    pub pub_id: String,
    pub title: String,
    pub year: i32,
    pub source: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateView {
    pub cluster_id: u64,
    #[serde(flatten)]
    pub meta: ClusterMeta,
    pub publications: Vec<PublicationSample>,
    pub verdict: Option<Verdict>,
    /// Other researchers this cluster is also a candidate for.
    pub also_claimed_by: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResearcherSummary {
    #[serde(flatten)]
    pub entry: RosterEntry,
    pub candidates: usize,
    pub decided: usize,
    pub pending: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Progress {
    pub researchers: usize,
    pub candidates: usize,
    pub decided: usize,
    pub pending: usize,
    pub accepted: usize,
    pub rejected: usize,
}

struct Ledger {
    log: DecisionLog,
    sink: Option<File>,
}

pub struct ReviewState {
    roster: Vec<RosterEntry>,
    clusters: ClusterSet,
    /// Live candidate cluster ids per person.
    candidates: BTreeMap<String, Vec<u64>>,
    claimants: HashMap<u64, BTreeSet<String>>,
    samples: HashMap<String, PublicationSample>,
    ledger: Mutex<Ledger>,
    token: Option<String>,
}

impl ReviewState {
    /// `decisions_path`, when given, is replayed first and then appended to.
    pub fn new(
        roster: Vec<RosterEntry>,
        clusters: Vec<Cluster>,
        assignments: &[Assignment],
        corpus: Option<&Corpus>,
        decisions_path: Option<&Path>,
        token: Option<String>,
    ) -> anyhow::Result<Self> {
        let mut candidates: BTreeMap<String, Vec<u64>> = BTreeMap::new();
        let mut claimants: HashMap<u64, BTreeSet<String>> = HashMap::new();
        for a in assignments.iter().filter(|a| a.status == Status::Candidate) {
            candidates.entry(a.person_id.clone()).or_default().push(a.cluster_id);
            claimants.entry(a.cluster_id).or_default().insert(a.person_id.clone());
        }
        let samples = corpus
            .map(|c| {
                c.publications()
                    .iter()
                    .map(|p| {
                        let s = PublicationSample {
                            pub_id: p.id().to_string(),
                            title: p.record.title.clone(),
                            year: p.year(),
                            source: p.record.source_title.clone(),
                        };
                        (s.pub_id.clone(), s)
                    })
                    .collect()
            })
            .unwrap_or_default();

        let (log, sink) = match decisions_path {
            Some(path) => {
                let log = if path.exists() {
                    DecisionLog::load(std::io::BufReader::new(File::open(path)?))?
                } else {
                    DecisionLog::new()
                };
                let sink = OpenOptions::new().create(true).append(true).open(path)?;
                (log, Some(sink))
            }
            None => (DecisionLog::new(), None),
        };
        Ok(ReviewState {
            roster,
            clusters: ClusterSet::new(clusters),
            candidates,
            claimants,
            samples,
            ledger: Mutex::new(Ledger { log, sink }),
            token,
        })
    }

    fn is_candidate(&self, person_id: &str, cluster_id: u64) -> bool {
        self.candidates
            .get(person_id)
            .is_some_and(|c| c.contains(&cluster_id))
    }

    fn ledger(&self) -> std::sync::MutexGuard<'_, Ledger> {
        // a panic while holding the lock cannot leave the log half-updated:
        // the file write happens before the in-memory insert
        self.ledger.lock().unwrap_or_else(|e| e.into_inner())
    }

    pub fn progress(&self) -> Progress {
        let ledger = self.ledger();
        let mut p = Progress {
            researchers: self.roster.len(),
            ..Default::default()
        };
        for (person, ids) in &self.candidates {
            for &id in ids {
                p.candidates += 1;
                match ledger.log.get(person, id).map(|d| d.verdict) {
                    Some(Verdict::Accept) => p.accepted += 1,
                    Some(Verdict::Reject) => p.rejected += 1,
                    None => p.pending += 1,
                }
            }
        }
        p.decided = p.accepted + p.rejected;
        p
    }

    /// Validates and records a decision: 404 for a pair that is not a live
    /// candidate, 409 for a pair already decided.
    pub fn decide(&self, mut d: ReviewDecision) -> Result<ReviewDecision, ApiError> {
        if !self.is_candidate(&d.person_id, d.cluster_id) {
            return Err(ApiError::NotFound(format!(
                "cluster {} is not a candidate for {}",
                d.cluster_id, d.person_id
            )));
        }
        if d.ts.is_empty() {
            let secs = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|t| t.as_secs())
                .unwrap_or_default();
            d.ts = secs.to_string();
        }
        let mut ledger = self.ledger();
        if ledger.log.get(&d.person_id, d.cluster_id).is_some() {
            return Err(ApiError::Conflict(format!(
                "cluster {} already decided for {}",
                d.cluster_id, d.person_id
            )));
        }
        if let Some(sink) = ledger.sink.as_mut() {
            append_decision(&d, sink).map_err(|e| ApiError::Internal(e.to_string()))?;
        }
        ledger.log.insert(d.clone()).map_err(|e| match e {
            PortfolioError::DuplicateDecision { .. } => ApiError::Conflict(e.to_string()),
            other => ApiError::Internal(other.to_string()),
        })?;
        Ok(d)
    }
}

#[derive(Debug)]
pub enum ApiError {
    NotFound(String),
    Conflict(String),
    Unauthorized,
    Internal(String),
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, msg) = match self {
            ApiError::NotFound(m) => (StatusCode::NOT_FOUND, m),
            ApiError::Conflict(m) => (StatusCode::CONFLICT, m),
            ApiError::Unauthorized => (StatusCode::UNAUTHORIZED, "missing or wrong token".into()),
            ApiError::Internal(m) => (StatusCode::INTERNAL_SERVER_ERROR, m),
        };
        (status, Json(json!({ "error": msg }))).into_response()
    }
}

type Shared = Arc<ReviewState>;

async fn researchers(State(s): State<Shared>) -> Json<Vec<ResearcherSummary>> {
    let ledger = s.ledger();
    let out = s
        .roster
        .iter()
        .map(|e| {
            let ids = s.candidates.get(&e.person_id).map(Vec::as_slice).unwrap_or(&[]);
            let decided = ids
                .iter()
                .filter(|&&id| ledger.log.get(&e.person_id, id).is_some())
                .count();
            ResearcherSummary {
                entry: e.clone(),
                candidates: ids.len(),
                decided,
                pending: ids.len() - decided,
            }
        })
        .collect();
    Json(out)
}

async fn candidates(
    State(s): State<Shared>,
    UrlPath(id): UrlPath<String>,
) -> Result<Json<serde_json::Value>, ApiError> {
    let entry = s
        .roster
        .iter()
        .find(|e| e.person_id == id)
        .ok_or_else(|| ApiError::NotFound(format!("unknown researcher {id}")))?;
    let ledger = s.ledger();
    let views: Vec<CandidateView> = s
        .candidates
        .get(&id)
        .into_iter()
        .flatten()
        .filter_map(|&cid| s.clusters.get(cid))
        .map(|c| CandidateView {
            cluster_id: c.cluster_id,
            meta: c.meta.clone(),
            publications: c
                .pub_ids()
                .into_iter()
                .map(|p| {
                    s.samples.get(p).cloned().unwrap_or_else(|| PublicationSample {
                        pub_id: p.to_string(),
                        title: String::new(),
                        year: 0,
                        source: String::new(),
                    })
                })
                .collect(),
            verdict: ledger.log.get(&id, c.cluster_id).map(|d| d.verdict),
            also_claimed_by: s
                .claimants
                .get(&c.cluster_id)
                .into_iter()
                .flatten()
                .filter(|p| **p != id)
                .cloned()
                .collect(),
        })
        .collect();
    Ok(Json(json!({ "researcher": entry, "candidates": views })))
}

async fn decisions(
    State(s): State<Shared>,
    Json(d): Json<ReviewDecision>,
) -> Result<(StatusCode, Json<ReviewDecision>), ApiError> {
    let d = s.decide(d)?;
    Ok((StatusCode::CREATED, Json(d)))
}

async fn progress(State(s): State<Shared>) -> Json<Progress> {
    Json(s.progress())
}

async fn require_token(State(s): State<Shared>, req: Request, next: Next) -> Result<Response, ApiError> {
    if let Some(token) = &s.token {
        let given = req
            .headers()
            .get(header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "));
        if given != Some(token.as_str()) {
            return Err(ApiError::Unauthorized);
        }
    }
    Ok(next.run(req).await)
}

/// The API under `/api`, plus static assets from `assets` for every other
/// path when given.
pub fn router(state: ReviewState, assets: Option<PathBuf>) -> Router {
    let state = Arc::new(state);
    let api = Router::new()
        .route("/researchers", get(researchers))
        .route("/researchers/{id}/candidates", get(candidates))
        .route("/decisions", post(decisions))
        .route("/progress", get(progress))
        .route_layer(middleware::from_fn_with_state(state.clone(), require_token))
        .with_state(state);
    let app = Router::new().nest("/api", api);
    match assets {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}
