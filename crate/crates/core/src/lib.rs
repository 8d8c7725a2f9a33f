//! Feature-level technical debt analysis for Java code bases.
//!
//! The pipeline parses sources into a [`model::CodeModel`], computes method
//! and class metrics, detects code smells, groups files into features reached
//! from controller files and rolls smell counts up per feature. The
//! [`history`] module replays the pipeline over git revisions.

pub mod analysis;
pub mod config;
pub mod features;
pub mod frontend;
pub mod history;
pub mod metrics;
pub mod model;
pub mod report;
pub mod rollup;
pub mod smells;
