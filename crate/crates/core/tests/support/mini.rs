//! The mini fixture and its hand-derived expectations.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use tdmap_core::analysis::{analyze_dir, Analysis};
use tdmap_core::config::Config;
use tdmap_core::metrics::{Scope, CLASS_METRICS, METHOD_METRICS};

pub fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures/mini")
}

#[derive(Deserialize)]
pub struct Expected {
    pub files: BTreeMap<String, (usize, u32)>,
    pub graph: Graph,
    pub invocations: BTreeMap<String, Vec<String>>,
    pub features: Vec<ExpectedFeature>,
    pub findings: Findings,
}

#[derive(Deserialize)]
pub struct Graph {
    pub edges: Vec<(String, String)>,
    pub controllers: Vec<String>,
}

#[derive(Deserialize)]
pub struct ExpectedFeature {
    pub name: String,
    pub controller: String,
    pub main_method: String,
    pub files: Vec<String>,
    pub total: u64,
    pub per_type: BTreeMap<String, u64>,
}

#[derive(Deserialize)]
pub struct Findings {
    pub keys: Vec<String>,
    pub per_file: BTreeMap<String, u64>,
    pub ranking: Vec<String>,
}

pub fn expected() -> Expected {
    toml::from_str(&std::fs::read_to_string(root().join("expected.toml")).unwrap()).unwrap()
}

pub fn analysis() -> Analysis {
    analyze_dir(&root(), &Config::default()).unwrap()
}

pub fn fraction(s: &str) -> f64 {
    match s.split_once('/') {
        Some((n, d)) => n.parse::<f64>().unwrap() / d.parse::<f64>().unwrap(),
        None => s.parse().unwrap(),
    }
}

/// entity -> metric -> value, from one of the committed TSV tables
pub fn table(name: &str) -> BTreeMap<String, BTreeMap<String, f64>> {
    let text = std::fs::read_to_string(root().join(name)).unwrap();
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    let header: Vec<&str> = lines.next().unwrap().split('\t').skip(1).collect();
    lines
        .map(|l| {
            let mut cols = l.split('\t');
            let entity = cols.next().unwrap().to_string();
            let vals = header.iter().zip(cols).map(|(h, v)| (h.to_string(), fraction(v))).collect();
            (entity, vals)
        })
        .collect()
}

/// Differences between computed metrics and one table; empty when equal.
/// Counts are exact and ratios within 1e-9.
pub fn metric_mismatches(scope: Scope, a: &Analysis) -> Vec<String> {
    let (file, names): (&str, &[&str]) = match scope {
        Scope::Class => ("metrics_classes.tsv", &CLASS_METRICS),
        Scope::Method => ("metrics_methods.tsv", &METHOD_METRICS),
    };
    let want = table(file);
    let mut got: BTreeMap<&str, &BTreeMap<String, f64>> = BTreeMap::new();
    for tm in &a.measures {
        match scope {
            Scope::Class => {
                got.insert(&tm.class.entity, &tm.class.values);
            }
            Scope::Method => {
                for m in &tm.methods {
                    got.insert(&m.entity, &m.values);
                }
            }
        }
    }
    let mut errs = Vec::new();
    if !got.keys().copied().eq(want.keys().map(String::as_str)) {
        errs.push(format!("{file}: entities {:?} vs table {:?}", got.keys().collect::<Vec<_>>(), want.keys().collect::<Vec<_>>()));
        return errs;
    }
    for (entity, row) in &want {
        if row.len() != names.len() {
            errs.push(format!("{file}: {entity} has {} columns", row.len()));
        }
        for name in names {
            let (Some(w), Some(g)) = (row.get(*name), got[entity.as_str()].get(*name)) else {
                errs.push(format!("{entity} {name}: missing"));
                continue;
            };
            if (w - g).abs() >= 1e-9 {
                errs.push(format!("{entity} {name}: table {w}, computed {g}"));
            }
        }
    }
    errs
}

/// Differences between identified features and the hand-derived ones.
pub fn feature_mismatches(a: &Analysis) -> Vec<String> {
    let exp = expected();
    let mut errs = Vec::new();
    if a.features.len() != exp.features.len() {
        errs.push(format!("{} features, expected {}", a.features.len(), exp.features.len()));
    }
    for (f, e) in a.features.iter().zip(&exp.features) {
        let got = (&f.name, &f.controller, &f.main_method, &f.files);
        let want = (&e.name, &e.controller, &e.main_method, &e.files);
        if got != want {
            errs.push(format!("feature {got:?}, expected {want:?}"));
        }
    }
    errs
}
