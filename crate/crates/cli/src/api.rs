//! Read-only HTTP view over a report document.
//!
//! The router holds the parsed JSON and answers from it; nothing is
//! recomputed, so every value served is the value in the file.

use std::collections::BTreeMap;
use std::path::Path;
use std::sync::Arc;

use axum::extract::{Path as UrlPath, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::get;
use axum::{Json, Router};
use serde_json::{json, Map, Value};
use tower_http::services::ServeDir;

/// Summary fields of `/api/features`; the detail route adds the rest.
const FEATURE_SUMMARY: &[&str] = &["id", "rank", "name", "controller", "main_method", "total"];

#[derive(Debug)]
struct Index {
    report: Value,
    features: BTreeMap<u64, usize>,
    files: BTreeMap<String, usize>,
    /// entity key → positions in `metrics`
    metrics: BTreeMap<String, Vec<usize>>,
    /// entity key → positions in `findings`
    findings_by_entity: BTreeMap<String, Vec<usize>>,
    /// file → positions in `findings`
    findings_by_file: BTreeMap<String, Vec<usize>>,
}

fn array<'a>(v: &'a Value, key: &str) -> &'a [Value] {
    v.get(key).and_then(Value::as_array).map(Vec::as_slice).unwrap_or(&[])
}

fn text<'a>(v: &'a Value, key: &str) -> Option<&'a str> {
    v.get(key).and_then(Value::as_str)
}

impl Index {
    fn new(report: Value) -> Self {
        let mut ix = Index {
            features: BTreeMap::new(),
            files: BTreeMap::new(),
            metrics: BTreeMap::new(),
            findings_by_entity: BTreeMap::new(),
            findings_by_file: BTreeMap::new(),
            report: Value::Null,
        };
        for (i, f) in array(&report, "features").iter().enumerate() {
            if let Some(id) = f.get("id").and_then(Value::as_u64) {
                ix.features.insert(id, i);
            }
        }
        for (i, f) in array(&report, "files").iter().enumerate() {
            if let Some(p) = text(f, "path") {
                ix.files.insert(p.to_string(), i);
            }
        }
        for (i, m) in array(&report, "metrics").iter().enumerate() {
            if let Some(e) = text(m, "entity") {
                ix.metrics.entry(e.to_string()).or_default().push(i);
            }
        }
        for (i, f) in array(&report, "findings").iter().enumerate() {
            if let Some(e) = text(f, "entity_key") {
                ix.findings_by_entity.entry(e.to_string()).or_default().push(i);
            }
            if let Some(p) = text(f, "file") {
                ix.findings_by_file.entry(p.to_string()).or_default().push(i);
            }
        }
        ix.report = report;
        ix
    }

    fn pick(&self, key: &str, at: Option<&Vec<usize>>) -> Vec<Value> {
        let all = array(&self.report, key);
        at.map(|is| is.iter().map(|i| all[*i].clone()).collect()).unwrap_or_default()
    }
}

type Shared = Arc<Index>;

fn not_found(what: &str) -> Response {
    (StatusCode::NOT_FOUND, Json(json!({ "error": format!("{what} not found") }))).into_response()
}

async fn features(State(ix): State<Shared>) -> Json<Value> {
    let rows: Vec<Value> = array(&ix.report, "features")
        .iter()
        .map(|f| {
            let m: Map<String, Value> = FEATURE_SUMMARY
                .iter()
                .filter_map(|k| f.get(*k).map(|v| (k.to_string(), v.clone())))
                .collect();
            Value::Object(m)
        })
        .collect();
    Json(Value::Array(rows))
}

async fn feature(State(ix): State<Shared>, UrlPath(id): UrlPath<String>) -> Response {
    match id.parse::<u64>().ok().and_then(|id| ix.features.get(&id)) {
        Some(i) => Json(array(&ix.report, "features")[*i].clone()).into_response(),
        None => not_found(&format!("feature {id}")),
    }
}

async fn file(State(ix): State<Shared>, UrlPath(path): UrlPath<String>) -> Response {
    let Some(i) = ix.files.get(&path) else {
        return not_found(&format!("file {path}"));
    };
    Json(json!({
        "file": array(&ix.report, "files")[*i],
        "findings": ix.pick("findings", ix.findings_by_file.get(&path)),
    }))
    .into_response()
}

async fn entity(State(ix): State<Shared>, UrlPath(key): UrlPath<String>) -> Response {
    let metrics = ix.pick("metrics", ix.metrics.get(&key));
    if metrics.is_empty() {
        return not_found(&format!("entity {key}"));
    }
    Json(json!({
        "entity": key,
        "metrics": metrics,
        "findings": ix.pick("findings", ix.findings_by_entity.get(&key)),
    }))
    .into_response()
}

async fn meta(State(ix): State<Shared>) -> Json<Value> {
    Json(json!({
        "metadata": ix.report.get("metadata").cloned().unwrap_or(Value::Null),
        "summary": ix.report.get("summary").cloned().unwrap_or(Value::Null),
    }))
}

/// GET-only routes over `report`, with an optional directory of static
/// assets served for every other path.
pub fn router(report: Value, static_dir: Option<&Path>) -> Router {
    let api = Router::new()
        .route("/api/features", get(features))
        .route("/api/features/{id}", get(feature))
        .route("/api/files/{*path}", get(file))
        .route("/api/entities/{key}", get(entity))
        .route("/api/meta", get(meta))
        .with_state(Arc::new(Index::new(report)));
    match static_dir {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api,
    }
}
