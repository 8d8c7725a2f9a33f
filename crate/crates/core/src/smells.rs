//! Threshold detection strategies for the seven smell types.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::{
    self, MetricOptions, MetricVector, Scope, ATFD, CLOC, CYCLO, FDP, LAA, MAXNESTING, MLOC, NOAM,
    NOAV, NOPA, TCC, WMC, WOC,
};
use crate::model::{CodeModel, IntegrityError};

/// Evidence key for the number of brain methods behind a BrainClass.
pub const BRAIN_METHODS: &str = "BRAIN_METHODS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SmellType {
    GodClass,
    BrainClass,
    DataClass,
    BrainMethod,
    ConditionalComplexity,
    LongMethod,
    FeatureEnvy,
}

impl SmellType {
    pub const ALL: [SmellType; 7] = [
        SmellType::GodClass,
        SmellType::BrainClass,
        SmellType::DataClass,
        SmellType::BrainMethod,
        SmellType::ConditionalComplexity,
        SmellType::LongMethod,
        SmellType::FeatureEnvy,
    ];

    pub fn scope(self) -> Scope {
        match self {
            SmellType::GodClass | SmellType::BrainClass | SmellType::DataClass => Scope::Class,
            _ => Scope::Method,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SmellType::GodClass => "GodClass",
            SmellType::BrainClass => "BrainClass",
            SmellType::DataClass => "DataClass",
            SmellType::BrainMethod => "BrainMethod",
            SmellType::ConditionalComplexity => "ConditionalComplexity",
            SmellType::LongMethod => "LongMethod",
            SmellType::FeatureEnvy => "FeatureEnvy",
        }
    }
}

impl fmt::Display for SmellType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SmellFinding {
    #[serde(rename = "type")]
    pub smell: SmellType,
    pub entity_key: String,
    pub file: String,
    #[serde(serialize_with = "metrics::serialize_values")]
    pub evidence: BTreeMap<String, f64>,
}

/// `<type>|<entity key>`; the file is left out so moving code inside a file
/// keeps the identity.
pub fn finding_key(f: &SmellFinding) -> String {
    format!("{}|{}", f.smell, f.entity_key)
}

#[derive(Debug, Error, PartialEq)]
pub enum SmellError {
    #[error("metric {metric} missing from vector of {entity}")]
    MissingMetric { entity: String, metric: String },
    #[error("expected a {expected:?} vector for {entity}")]
    WrongScope { entity: String, expected: Scope },
    #[error(transparent)]
    Integrity(#[from] IntegrityError),
}

#[derive(Debug, Error, PartialEq)]
pub enum ThresholdError {
    #[error("threshold {0} must be a positive number")]
    NotPositive(&'static str),
    #[error("ratio threshold {0} must lie in (0, 1]")]
    RatioRange(&'static str),
}

/// Which way a threshold moves to make its strategy harder to satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tighten {
    /// `metric > t` or `metric ≥ t`: raising `t` tightens.
    Raise,
    /// `metric < t` or `metric ≤ t`: lowering `t` tightens.
    Lower,
}

/// One number per strategy term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdConfig {
    pub brain_method_mloc: f64,
    pub brain_method_cyclo: f64,
    pub brain_method_maxnesting: f64,
    pub brain_method_noav: f64,
    pub conditional_complexity_cyclo: f64,
    pub long_method_mloc: f64,
    pub feature_envy_atfd: f64,
    pub feature_envy_laa: f64,
    pub feature_envy_fdp: f64,
    pub god_class_atfd: f64,
    pub god_class_wmc: f64,
    pub god_class_tcc: f64,
    pub brain_class_tcc: f64,
    pub brain_class_cloc: f64,
    pub brain_class_wmc: f64,
    pub brain_class_single_cloc: f64,
    pub brain_class_single_wmc: f64,
    pub data_class_woc: f64,
    pub data_class_low_accessors: f64,
    pub data_class_low_wmc: f64,
    pub data_class_high_accessors: f64,
    pub data_class_high_wmc: f64,
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self {
            brain_method_mloc: 65.0,
            brain_method_cyclo: 7.0,
            brain_method_maxnesting: 5.0,
            brain_method_noav: 7.0,
            conditional_complexity_cyclo: 10.0,
            long_method_mloc: 65.0,
            feature_envy_atfd: 5.0,
            feature_envy_laa: 1.0 / 3.0,
            feature_envy_fdp: 3.0,
            god_class_atfd: 5.0,
            god_class_wmc: 47.0,
            god_class_tcc: 1.0 / 3.0,
            brain_class_tcc: 0.5,
            brain_class_cloc: 195.0,
            brain_class_wmc: 47.0,
            brain_class_single_cloc: 390.0,
            brain_class_single_wmc: 94.0,
            data_class_woc: 1.0 / 3.0,
            data_class_low_accessors: 5.0,
            data_class_low_wmc: 31.0,
            data_class_high_accessors: 10.0,
            data_class_high_wmc: 47.0,
        }
    }
}

macro_rules! terms {
    ($($field:ident : $dir:ident),* $(,)?) => {
        /// Every threshold with the direction that tightens it.
        pub const TERMS: &'static [(&'static str, Tighten)] = &[$((stringify!($field), Tighten::$dir)),*];

        pub fn get(&self, name: &str) -> Option<f64> {
            match name {
                $(stringify!($field) => Some(self.$field),)*
                _ => None,
            }
        }

        pub fn get_mut(&mut self, name: &str) -> Option<&mut f64> {
            match name {
                $(stringify!($field) => Some(&mut self.$field),)*
                _ => None,
            }
        }
    };
}

impl ThresholdConfig {
    terms! {
        brain_method_mloc: Raise,
        brain_method_cyclo: Raise,
        brain_method_maxnesting: Raise,
        brain_method_noav: Raise,
        conditional_complexity_cyclo: Raise,
        long_method_mloc: Raise,
        feature_envy_atfd: Raise,
        feature_envy_laa: Lower,
        feature_envy_fdp: Lower,
        god_class_atfd: Raise,
        god_class_wmc: Raise,
        god_class_tcc: Lower,
        brain_class_tcc: Lower,
        brain_class_cloc: Raise,
        brain_class_wmc: Raise,
        brain_class_single_cloc: Raise,
        brain_class_single_wmc: Raise,
        data_class_woc: Lower,
        data_class_low_accessors: Raise,
        data_class_low_wmc: Lower,
        data_class_high_accessors: Raise,
        data_class_high_wmc: Lower,
    }

    const RATIOS: [&'static str; 4] = ["feature_envy_laa", "god_class_tcc", "brain_class_tcc", "data_class_woc"];

    pub fn validate(&self) -> Result<(), ThresholdError> {
        for (name, _) in Self::TERMS {
            let v = self.get(name).unwrap_or(0.0);
            if !(v.is_finite() && v > 0.0) {
                return Err(ThresholdError::NotPositive(name));
            }
            if Self::RATIOS.contains(name) && v > 1.0 {
                return Err(ThresholdError::RatioRange(name));
            }
        }
        Ok(())
    }
}

struct Reader<'a> {
    v: &'a MetricVector,
}

impl Reader<'_> {
    fn get(&self, name: &str) -> Result<f64, SmellError> {
        self.v.get(name).ok_or_else(|| SmellError::MissingMetric {
            entity: self.v.entity.clone(),
            metric: name.to_string(),
        })
    }
}

fn finding(v: &MetricVector, smell: SmellType, evidence: &[(&str, f64)]) -> SmellFinding {
    SmellFinding {
        smell,
        entity_key: v.entity.clone(),
        file: v.file.clone(),
        evidence: evidence.iter().map(|(k, x)| (k.to_string(), *x)).collect(),
    }
}

pub fn detect_method_smells(mv: &MetricVector, cfg: &ThresholdConfig) -> Result<Vec<SmellFinding>, SmellError> {
    if mv.scope != Scope::Method {
        return Err(SmellError::WrongScope {
            entity: mv.entity.clone(),
            expected: Scope::Method,
        });
    }
    let r = Reader { v: mv };
    let (mloc, cyclo, nest, noav) = (r.get(MLOC)?, r.get(CYCLO)?, r.get(MAXNESTING)?, r.get(NOAV)?);
    let (atfd, laa, fdp) = (r.get(ATFD)?, r.get(LAA)?, r.get(FDP)?);
    let mut out = Vec::new();
    if mloc > cfg.brain_method_mloc
        && cyclo >= cfg.brain_method_cyclo
        && nest >= cfg.brain_method_maxnesting
        && noav > cfg.brain_method_noav
    {
        out.push(finding(
            mv,
            SmellType::BrainMethod,
            &[(MLOC, mloc), (CYCLO, cyclo), (MAXNESTING, nest), (NOAV, noav)],
        ));
    }
    if cyclo >= cfg.conditional_complexity_cyclo {
        out.push(finding(mv, SmellType::ConditionalComplexity, &[(CYCLO, cyclo)]));
    }
    if mloc > cfg.long_method_mloc {
        out.push(finding(mv, SmellType::LongMethod, &[(MLOC, mloc)]));
    }
    if atfd > cfg.feature_envy_atfd && laa < cfg.feature_envy_laa && fdp <= cfg.feature_envy_fdp {
        out.push(finding(
            mv,
            SmellType::FeatureEnvy,
            &[(ATFD, atfd), (LAA, laa), (FDP, fdp)],
        ));
    }
    Ok(out)
}

/// Class strategies. `method_findings` are the findings of this class's
/// methods; only their BrainMethod count is used.
pub fn detect_class_smells(
    cv: &MetricVector,
    method_findings: &[SmellFinding],
    cfg: &ThresholdConfig,
) -> Result<Vec<SmellFinding>, SmellError> {
    if cv.scope != Scope::Class {
        return Err(SmellError::WrongScope {
            entity: cv.entity.clone(),
            expected: Scope::Class,
        });
    }
    let r = Reader { v: cv };
    let (atfd, wmc, tcc, cloc) = (r.get(ATFD)?, r.get(WMC)?, r.get(TCC)?, r.get(CLOC)?);
    let (woc, nopa, noam) = (r.get(WOC)?, r.get(NOPA)?, r.get(NOAM)?);
    let brain_methods = method_findings
        .iter()
        .filter(|f| f.smell == SmellType::BrainMethod)
        .count();
    let mut out = Vec::new();

    let god = atfd > cfg.god_class_atfd && wmc >= cfg.god_class_wmc && tcc < cfg.god_class_tcc;
    if god {
        out.push(finding(cv, SmellType::GodClass, &[(ATFD, atfd), (WMC, wmc), (TCC, tcc)]));
    }

    let many = brain_methods > 1 && cloc >= cfg.brain_class_cloc && wmc >= cfg.brain_class_wmc;
    let single =
        brain_methods == 1 && cloc >= cfg.brain_class_single_cloc && wmc >= cfg.brain_class_single_wmc;
    if !god && tcc < cfg.brain_class_tcc && (many || single) {
        out.push(finding(
            cv,
            SmellType::BrainClass,
            &[
                (ATFD, atfd),
                (WMC, wmc),
                (TCC, tcc),
                (CLOC, cloc),
                (BRAIN_METHODS, brain_methods as f64),
            ],
        ));
    }

    let accessors = nopa + noam;
    let low = accessors > cfg.data_class_low_accessors && wmc < cfg.data_class_low_wmc;
    let high = accessors > cfg.data_class_high_accessors && wmc < cfg.data_class_high_wmc;
    if woc < cfg.data_class_woc && (low || high) {
        out.push(finding(
            cv,
            SmellType::DataClass,
            &[(WOC, woc), (NOPA, nopa), (NOAM, noam), (WMC, wmc)],
        ));
    }
    Ok(out)
}

/// Run both strategy sets over precomputed measurements.
pub fn detect_measured(
    measures: &[metrics::TypeMeasures],
    cfg: &ThresholdConfig,
) -> Result<Vec<SmellFinding>, SmellError> {
    let mut all = Vec::new();
    for tm in measures {
        let mut method_findings = Vec::new();
        for mv in &tm.methods {
            method_findings.extend(detect_method_smells(mv, cfg)?);
        }
        all.extend(detect_class_smells(&tm.class, &method_findings, cfg)?);
        all.extend(method_findings);
    }
    sort_findings(&mut all);
    Ok(all)
}

/// Order by file, entity key, then smell type.
pub fn sort_findings(findings: &mut [SmellFinding]) {
    findings.sort_by(|a, b| {
        (&a.file, &a.entity_key, a.smell).cmp(&(&b.file, &b.entity_key, b.smell))
    });
}

/// Metrics plus both strategy sets over the whole model.
pub fn detect_all(
    model: &CodeModel,
    cfg: &ThresholdConfig,
    opts: MetricOptions,
) -> Result<Vec<SmellFinding>, SmellError> {
    let measures = metrics::measure_all(model, opts)?;
    detect_measured(&measures, cfg)
}
