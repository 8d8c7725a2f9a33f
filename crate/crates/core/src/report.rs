//! Report documents and their JSON form.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use serde_json::{Map, Value};

use crate::analysis::{Analysis, Diagnostic};
use crate::config::Config;
use crate::history::{format_timestamp, DebtDelta, DebtLedger, Revision};
use crate::metrics::MetricVector;
use crate::smells::{finding_key, SmellFinding, SmellType};

pub const SCHEMA_VERSION: &str = "1";
/// JSON schema of [`AnalysisReport`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/report-v1.schema.json");
/// JSON schema of [`DeltaReport`].
pub const DELTA_SCHEMA: &str = include_str!("../schema/delta-v1.schema.json");

const LIMITATIONS: &[&str] = &[
    "file renames are not tracked: a moved or renamed class reads as debt paid plus debt inserted",
    "receiver types come from declared types only; calls on untyped expressions are not attributed",
];

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub schema_version: String,
    pub tool: String,
    pub tool_version: String,
    pub config: Config,
    /// Path or repository the report was produced from, as given.
    pub source: String,
    pub revision: Option<String>,
    /// Commit time of the analyzed revision; absent for plain directories.
    pub timestamp: Option<String>,
    pub limitations: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub files: usize,
    pub types: usize,
    pub methods: usize,
    pub references: usize,
    pub findings: usize,
    pub features: usize,
    pub parse_gaps: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FeatureReport {
    pub id: usize,
    pub rank: usize,
    pub name: String,
    pub controller: String,
    pub main_method: String,
    pub total: u64,
    pub per_file: BTreeMap<String, u64>,
    pub per_type: BTreeMap<SmellType, u64>,
    pub files: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FileReport {
    pub path: String,
    pub package: String,
    pub loc: u32,
    pub parse_gaps: u32,
    pub debt: u64,
    /// Class and method keys declared in the file.
    pub entities: Vec<String>,
    /// Finding keys located in the file.
    pub findings: Vec<String>,
    pub references_out: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub metadata: Metadata,
    pub summary: Summary,
    /// In ranking order.
    pub features: Vec<FeatureReport>,
    pub files: Vec<FileReport>,
    pub findings: Vec<SmellFinding>,
    pub metrics: Vec<MetricVector>,
    pub diagnostics: Vec<Diagnostic>,
    pub ledger: Option<DebtLedger>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DeltaReport {
    pub schema_version: String,
    pub from_rev: String,
    pub to_rev: String,
    pub before: usize,
    pub after: usize,
    pub inserted: BTreeSet<String>,
    pub paid: BTreeSet<String>,
}

impl DeltaReport {
    pub fn new(delta: DebtDelta, before: usize, after: usize) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.into(),
            from_rev: delta.from_rev,
            to_rev: delta.to_rev,
            before,
            after,
            inserted: delta.inserted,
            paid: delta.paid,
        }
    }
}

pub fn build_report(
    analysis: &Analysis,
    cfg: &Config,
    source: &str,
    revision: Option<&Revision>,
    ledger: Option<DebtLedger>,
) -> AnalysisReport {
    let model = &analysis.model;
    let by_id: BTreeMap<usize, &crate::features::Feature> =
        analysis.features.iter().map(|f| (f.id, f)).collect();
    let features = analysis
        .ranking
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let f = by_id[&d.id];
            FeatureReport {
                id: d.id,
                rank: i + 1,
                name: d.name.clone(),
                controller: f.controller.clone(),
                main_method: f.main_method.clone(),
                total: d.total,
                per_file: d.per_file.clone(),
                per_type: d.per_type.clone().unwrap_or_default(),
                files: f.files.clone(),
            }
        })
        .collect();

    let mut entities: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    let mut metrics = Vec::new();
    for tm in &analysis.measures {
        let e = entities.entry(tm.class.file.as_str()).or_default();
        e.push(tm.class.entity.clone());
        e.extend(tm.methods.iter().map(|m| m.entity.clone()));
        metrics.push(tm.class.clone());
        metrics.extend(tm.methods.iter().cloned());
    }
    metrics.sort_by(|a, b| (&a.file, &a.entity, a.scope).cmp(&(&b.file, &b.entity, b.scope)));

    let mut by_file: BTreeMap<&str, Vec<String>> = BTreeMap::new();
    for f in &analysis.findings {
        by_file.entry(f.file.as_str()).or_default().push(finding_key(f));
    }
    let mut out_refs: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for r in &model.references {
        out_refs.entry(r.from_file.as_str()).or_default().insert(r.to_file.as_str());
    }
    let files = model
        .files
        .values()
        .map(|sf| {
            let findings = by_file.get(sf.path.as_str()).cloned().unwrap_or_default();
            let mut ents = entities.get(sf.path.as_str()).cloned().unwrap_or_default();
            ents.sort();
            FileReport {
                path: sf.path.clone(),
                package: sf.package.clone(),
                loc: sf.loc,
                parse_gaps: sf.parse_gaps,
                debt: findings.len() as u64,
                entities: ents,
                findings,
                references_out: out_refs
                    .get(sf.path.as_str())
                    .map(|s| s.iter().map(|p| p.to_string()).collect())
                    .unwrap_or_default(),
            }
        })
        .collect();

    AnalysisReport {
        metadata: Metadata {
            schema_version: SCHEMA_VERSION.into(),
            tool: "tdmap".into(),
            tool_version: env!("CARGO_PKG_VERSION").into(),
            config: cfg.clone(),
            source: source.into(),
            revision: revision.map(|r| r.id.clone()),
            timestamp: revision.map(|r| format_timestamp(r.timestamp)),
            limitations: LIMITATIONS.iter().map(|s| s.to_string()).collect(),
        },
        summary: Summary {
            files: model.files.len(),
            types: model.types.len(),
            methods: model.methods.len(),
            references: model.references.len(),
            findings: analysis.findings.len(),
            features: analysis.features.len(),
            parse_gaps: model.files.values().map(|f| f.parse_gaps as u64).sum(),
        },
        features,
        files,
        findings: analysis.findings.clone(),
        metrics,
        diagnostics: analysis.diagnostics.clone(),
        ledger,
    }
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(m) => {
            let sorted: BTreeMap<String, Value> = m.into_iter().map(|(k, v)| (k, sort_keys(v))).collect();
            Value::Object(sorted.into_iter().collect::<Map<String, Value>>())
        }
        Value::Array(a) => Value::Array(a.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Pretty UTF-8 JSON with object keys sorted, newline-terminated.
pub fn to_json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, serde_json::Error> {
    let v = sort_keys(serde_json::to_value(value)?);
    let mut out = serde_json::to_vec_pretty(&v)?;
    out.push(b'\n');
    Ok(out)
}

pub fn export_json(report: &AnalysisReport) -> Result<Vec<u8>, serde_json::Error> {
    to_json_bytes(report)
}

/// Every feature file, finding file and metric file is a reported file,
/// and every file's findings appear in the findings list.
pub fn check_consistency(report: &AnalysisReport) -> Result<(), String> {
    let files: BTreeSet<&str> = report.files.iter().map(|f| f.path.as_str()).collect();
    let keys: BTreeSet<String> = report.findings.iter().map(finding_key).collect();
    for feat in &report.features {
        for f in &feat.files {
            if !files.contains(f.as_str()) {
                return Err(format!("feature {} lists unknown file {f}", feat.name));
            }
        }
        let per_type: u64 = feat.per_type.values().sum();
        let per_file: u64 = feat.per_file.values().sum();
        if per_type != feat.total || per_file != feat.total {
            return Err(format!("feature {} totals disagree", feat.name));
        }
    }
    for f in &report.findings {
        if !files.contains(f.file.as_str()) {
            return Err(format!("finding {} in unknown file", finding_key(f)));
        }
    }
    for fr in &report.files {
        for k in &fr.findings {
            if !keys.contains(k) {
                return Err(format!("file {} lists unknown finding {k}", fr.path));
            }
        }
    }
    for m in &report.metrics {
        if !files.contains(m.file.as_str()) {
            return Err(format!("metrics of {} in unknown file", m.entity));
        }
    }
    Ok(())
}
