//! End-to-end pipeline: sources → model → metrics → findings → features →
//! ranking.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;
use walkdir::WalkDir;

use crate::config::{Config, ConfigError, FileFilter};
use crate::features::{identify_features, Feature};
use crate::frontend::{build_model, parse_unit, CompilationUnit, ModelError};
use crate::metrics::{measure_all, TypeMeasures};
use crate::model::{CodeModel, IntegrityError};
use crate::rollup::{file_debt_counts, rank, rollup_feature, type_breakdown, FeatureDebt, RollupError};
use crate::smells::{detect_measured, SmellError, SmellFinding};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("source path {0} does not exist")]
    NotFound(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Integrity(#[from] IntegrityError),
    #[error(transparent)]
    Smell(#[from] SmellError),
    #[error(transparent)]
    Rollup(#[from] RollupError),
}

/// A file that was left out of the analysis, and why.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceText {
    /// `/`-separated path relative to the analyzed root.
    pub path: String,
    pub text: String,
}

impl SourceText {
    pub fn from_bytes(path: String, bytes: Vec<u8>) -> Result<Self, Diagnostic> {
        match String::from_utf8(bytes) {
            Ok(text) => Ok(Self { path, text }),
            Err(_) => Err(Diagnostic {
                path,
                message: "not valid UTF-8".into(),
            }),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub model: CodeModel,
    pub measures: Vec<TypeMeasures>,
    pub findings: Vec<SmellFinding>,
    pub features: Vec<Feature>,
    /// Ranked, with per-type breakdowns attached.
    pub ranking: Vec<FeatureDebt>,
    pub diagnostics: Vec<Diagnostic>,
}

/// Java files under `root` accepted by `filter`, sorted by path.
pub fn load_sources(root: &Path, filter: &FileFilter) -> Result<(Vec<SourceText>, Vec<Diagnostic>), AnalysisError> {
    if !root.exists() {
        return Err(AnalysisError::NotFound(root.display().to_string()));
    }
    let mut sources = Vec::new();
    let mut diags = Vec::new();
    for entry in WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(|e| AnalysisError::Io {
            path: e.path().unwrap_or(root).display().to_string(),
            source: e.into(),
        })?;
        if !entry.file_type().is_file() {
            continue;
        }
        let rel = entry.path().strip_prefix(root).unwrap_or(entry.path());
        let rel: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
        let rel = rel.join("/");
        if !rel.ends_with(".java") || !filter.accepts(&rel) {
            continue;
        }
        let bytes = std::fs::read(entry.path()).map_err(|source| AnalysisError::Io {
            path: entry.path().display().to_string(),
            source,
        })?;
        match SourceText::from_bytes(rel, bytes) {
            Ok(s) => sources.push(s),
            Err(d) => diags.push(d),
        }
    }
    sources.sort_by(|a, b| a.path.cmp(&b.path));
    Ok((sources, diags))
}

/// Parse, resolve, measure, detect and roll up. Files that fail to tokenize
/// or parse are skipped and reported as diagnostics.
pub fn analyze_sources(sources: &[SourceText], cfg: &Config) -> Result<Analysis, AnalysisError> {
    cfg.validate()?;
    let parsed: Vec<Result<CompilationUnit, Diagnostic>> = sources
        .par_iter()
        .map(|s| {
            parse_unit(&s.text, &s.path).map_err(|e| Diagnostic {
                path: s.path.clone(),
                message: e.to_string(),
            })
        })
        .collect();
    let mut units = Vec::new();
    let mut diagnostics = Vec::new();
    for p in parsed {
        match p {
            Ok(u) => units.push(u),
            Err(d) => {
                tracing::warn!(path = %d.path, "{}", d.message);
                diagnostics.push(d);
            }
        }
    }
    let model = build_model(units)?;
    let measures = measure_all(&model, cfg.metric_options())?;
    let findings = detect_measured(&measures, &cfg.thresholds)?;
    let features = identify_features(&model, &cfg.features);
    let counts = file_debt_counts(&findings);
    let debts = features
        .iter()
        .map(|f| rollup_feature(f, &counts)?.with_breakdown(type_breakdown(f, &findings)))
        .collect::<Result<Vec<_>, _>>()?;
    diagnostics.sort();
    Ok(Analysis {
        model,
        measures,
        findings,
        features,
        ranking: rank(debts),
        diagnostics,
    })
}

pub fn analyze_dir(root: &Path, cfg: &Config) -> Result<Analysis, AnalysisError> {
    let (sources, mut diags) = load_sources(root, &cfg.file_filter()?)?;
    let mut a = analyze_sources(&sources, cfg)?;
    a.diagnostics.append(&mut diags);
    a.diagnostics.sort();
    Ok(a)
}
