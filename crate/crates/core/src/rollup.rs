//! Per-file and per-feature debt totals and the feature ranking.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::features::Feature;
use crate::smells::{SmellFinding, SmellType};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RollupError {
    #[error("feature {0} has no files")]
    EmptyFeature(String),
    #[error("per-type counts of feature {name} sum to {per_type}, total is {total}")]
    Inconsistent { name: String, total: u64, per_type: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FeatureDebt {
    pub id: usize,
    pub name: String,
    pub total: u64,
    /// Every feature file, zero counts included.
    pub per_file: BTreeMap<String, u64>,
    /// All seven types, zeros included.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_type: Option<BTreeMap<SmellType, u64>>,
}

impl FeatureDebt {
    /// Attach a per-type breakdown, checking it against the total.
    pub fn with_breakdown(mut self, per_type: BTreeMap<SmellType, u64>) -> Result<Self, RollupError> {
        let sum: u64 = per_type.values().sum();
        if sum != self.total {
            return Err(RollupError::Inconsistent {
                name: self.name,
                total: self.total,
                per_type: sum,
            });
        }
        self.per_type = Some(per_type);
        Ok(self)
    }
}

/// Findings per file; files without findings are absent.
pub fn file_debt_counts(findings: &[SmellFinding]) -> BTreeMap<String, u64> {
    let mut m = BTreeMap::new();
    for f in findings {
        *m.entry(f.file.clone()).or_insert(0) += 1;
    }
    m
}

pub fn rollup_feature(feature: &Feature, counts: &BTreeMap<String, u64>) -> Result<FeatureDebt, RollupError> {
    if feature.files.is_empty() {
        return Err(RollupError::EmptyFeature(feature.name.clone()));
    }
    let per_file: BTreeMap<String, u64> = feature
        .files
        .iter()
        .map(|f| (f.clone(), counts.get(f).copied().unwrap_or(0)))
        .collect();
    Ok(FeatureDebt {
        id: feature.id,
        name: feature.name.clone(),
        total: per_file.values().sum(),
        per_file,
        per_type: None,
    })
}

/// Findings inside the feature's files, by type.
pub fn type_breakdown(feature: &Feature, findings: &[SmellFinding]) -> BTreeMap<SmellType, u64> {
    let files: BTreeSet<&str> = feature.files.iter().map(String::as_str).collect();
    let mut m: BTreeMap<SmellType, u64> = SmellType::ALL.iter().map(|t| (*t, 0)).collect();
    for f in findings.iter().filter(|f| files.contains(f.file.as_str())) {
        *m.entry(f.smell).or_insert(0) += 1;
    }
    m
}

/// Descending total, ties by ascending name.
pub fn rank(mut debts: Vec<FeatureDebt>) -> Vec<FeatureDebt> {
    debts.sort_by(|a, b| b.total.cmp(&a.total).then_with(|| a.name.cmp(&b.name)).then(a.id.cmp(&b.id)));
    debts
}
