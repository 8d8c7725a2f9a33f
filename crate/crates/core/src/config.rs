//! Analysis configuration, loaded from a TOML document.
//!
//! ```toml
//! [thresholds]
//! god_class_wmc = 50
//!
//! [frontend]
//! include = ["src/**/*.java"]
//! exclude = ["**/test/**"]
//!
//! [features]
//! controller_suffixes = ["MBean", "Controller"]
//!
//! [metrics]
//! tcc_visible_only = true
//! ```
//!
//! Unknown keys are rejected.

use std::path::Path;

use globset::{Glob, GlobSet, GlobSetBuilder};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::MetricOptions;
use crate::smells::{ThresholdConfig, ThresholdError};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("invalid glob {pattern:?}: {source}")]
    Glob {
        pattern: String,
        #[source]
        source: globset::Error,
    },
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FrontendConfig {
    pub include: Vec<String>,
    pub exclude: Vec<String>,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        Self {
            include: vec!["**/*.java".into()],
            exclude: Vec::new(),
        }
    }
}

/// Toggles for controller and main-method identification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FeatureConfig {
    /// Stripped from controller names when labelling features.
    pub controller_suffixes: Vec<String>,
    pub main_requires_public: bool,
    pub main_requires_calls: bool,
    pub main_excludes_called: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self {
            controller_suffixes: ["MBean", "Controller", "Servlet", "Action", "Resource"]
                .map(String::from)
                .to_vec(),
            main_requires_public: true,
            main_requires_calls: true,
            main_excludes_called: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    pub tcc_visible_only: bool,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self { tcc_visible_only: true }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub thresholds: ThresholdConfig,
    pub frontend: FrontendConfig,
    pub features: FeatureConfig,
    pub metrics: MetricsConfig,
}

impl Config {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Config = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.thresholds.validate()?;
        self.file_filter()?;
        Ok(())
    }

    pub fn metric_options(&self) -> MetricOptions {
        MetricOptions {
            tcc_visible_only: self.metrics.tcc_visible_only,
        }
    }

    pub fn file_filter(&self) -> Result<FileFilter, ConfigError> {
        Ok(FileFilter {
            include: glob_set(&self.frontend.include)?,
            exclude: glob_set(&self.frontend.exclude)?,
        })
    }
}

fn glob_set(patterns: &[String]) -> Result<GlobSet, ConfigError> {
    let mut b = GlobSetBuilder::new();
    for p in patterns {
        let g = Glob::new(p).map_err(|source| ConfigError::Glob {
            pattern: p.clone(),
            source,
        })?;
        b.add(g);
    }
    b.build().map_err(|source| ConfigError::Glob {
        pattern: patterns.join(","),
        source,
    })
}

/// Include/exclude matcher over `/`-separated relative paths.
#[derive(Debug, Clone)]
pub struct FileFilter {
    include: GlobSet,
    exclude: GlobSet,
}

impl FileFilter {
    pub fn accepts(&self, rel_path: &str) -> bool {
        self.include.is_match(rel_path) && !self.exclude.is_match(rel_path)
    }
}
