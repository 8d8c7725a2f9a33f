//! Loader for the smell strategy corpus under tests/fixtures/smells.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tdmap_core::analysis::{analyze_dir, Analysis};
use tdmap_core::config::Config;
use tdmap_core::smells::finding_key;

#[derive(Debug, Deserialize)]
pub struct Case {
    pub smell: String,
    pub dir: String,
    pub subject: String,
    pub positive: BTreeSet<String>,
    pub boundary: BTreeSet<String>,
    pub positive_metrics: BTreeMap<String, String>,
    pub boundary_metrics: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
struct Corpus {
    case: Vec<Case>,
}

pub fn corpus_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures/smells")
}

pub fn cases() -> Vec<Case> {
    let text = std::fs::read_to_string(corpus_root().join("expected.toml")).unwrap();
    toml::from_str::<Corpus>(&text).unwrap().case
}

pub fn fraction(s: &str) -> f64 {
    match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

pub fn analyze_variant(case: &Case, variant: &str) -> Analysis {
    analyze_dir(&corpus_root().join(variant).join(&case.dir), &Config::default()).unwrap()
}

pub fn keys(a: &Analysis) -> BTreeSet<String> {
    a.findings.iter().map(finding_key).collect()
}

/// Value of `metric` on the entity keyed `entity`.
pub fn metric(a: &Analysis, entity: &str, metric: &str) -> Option<f64> {
    a.measures
        .iter()
        .flat_map(|tm| std::iter::once(&tm.class).chain(tm.methods.iter()))
        .find(|v| v.entity == entity)
        .and_then(|v| v.get(metric))
}

/// Mismatches between a variant and its expectations, empty when it holds.
pub fn check_variant(case: &Case, variant: &str) -> Vec<String> {
    let a = analyze_variant(case, variant);
    let (want, vector) = match variant {
        "positive" => (&case.positive, &case.positive_metrics),
        _ => (&case.boundary, &case.boundary_metrics),
    };
    let mut errs = Vec::new();
    let got = keys(&a);
    if &got != want {
        errs.push(format!("{} {variant}: findings {got:?}, expected {want:?}", case.smell));
    }
    for (name, v) in vector {
        match metric(&a, &case.subject, name) {
            Some(g) if (g - fraction(v)).abs() < 1e-9 => {}
            g => errs.push(format!("{} {variant}: {} {name} = {g:?}, expected {v}", case.smell, case.subject)),
        }
    }
    errs
}
